#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "wmgf/rng.hpp"
#include "wmgf/streamlines.hpp"
#include "wmgf/volume.hpp"

namespace wmgf {

/// Target grid for phantom synthesis.
struct GridSpec {
    Dims3 dims{0, 0, 0};
    std::array<double, 3> voxel_size_mm{1.0, 1.0, 1.0};

    void validate() const;
};

/// Ground-truth activation amplitudes in [0,1] plus the floor that
/// binarizes them for ROC scoring.
struct ActivationPattern {
    Volume3D amplitude;
    double activation_floor = 0.1;

    Mask ground_truth_mask() const;
    void validate() const;
};

struct BlockParadigm {
    std::size_t n_frames = 200;
    double tr_seconds = 1.0;
    std::size_t block_on_frames = 10;
    std::size_t block_off_frames = 10;
    double amplitude_scale = 1.0;

    void validate() const;
};

struct PhantomSpec {
    std::size_t n_streamlines = 100;
    double diffusion_sigma_mm = 10.0; // arc-length extent of the activation spread
    double noise_sigma = 1.0;
    std::uint64_t rng_seed = 0;
    double activation_floor = 0.1;

    void validate() const;
};

/// Gaussian activation profile along the streamline's arc length, centered
/// at a uniformly sampled origin. The profile is sampled at one step per
/// voxel anchored at the origin and rasterized by per-voxel maximum; the
/// origin voxel gets amplitude exactly 1.
ActivationPattern streamline_activation(const Streamline& line, const GridSpec& grid,
                                        double diffusion_sigma_mm, Rng& rng,
                                        double activation_floor = 0.1);

/// Voxelwise maximum of per-streamline patterns.
ActivationPattern combine_patterns(std::span<const ActivationPattern> patterns);

/// Repeating off/on boxcar, off block first, scaled by amplitude_scale.
std::vector<double> block_regressor(const BlockParadigm& paradigm);

/// Unit-height boxcar (amplitude_scale ignored). GLM designs are built
/// from this so the fitted coefficient comes out in signal units,
/// beta = amplitude * amplitude_scale.
std::vector<double> unit_regressor(const BlockParadigm& paradigm);

/// Mean-centered copy of the scaled boxcar.
std::vector<double> centered_regressor(const BlockParadigm& paradigm);

/// y_v(t) = amplitude_v * x(t) + noise, noise ~ N(0, sigma^2) drawn from the
/// counter-based generator indexed by (voxel, frame); bit-identical for a
/// given seed regardless of scheduling.
Volume4D synthesize_timeseries(const ActivationPattern& pattern, std::span<const double> regressor,
                               double noise_sigma, std::uint64_t rng_seed,
                               double tr_seconds = 1.0);

struct PhantomBundle {
    ActivationPattern pattern;
    Volume4D series;
};

/// Full phantom synthesis: per-streamline activations (substream = index),
/// voxelwise-max combination, block regressor, noisy series.
PhantomBundle make_phantom(const StreamlineSet& streamlines, const GridSpec& grid,
                           const PhantomSpec& spec, const BlockParadigm& paradigm,
                           unsigned threads = 1);

/// Everything needed to regenerate a bundle bit-exactly.
struct PhantomProvenance {
    GridSpec grid;
    PhantomSpec spec;
    BlockParadigm paradigm;
    std::string streamlines_path;
    std::uint64_t streamlines_fnv1a = 0;
};

/// Writes amplitude.vol, truth.vol, series.vol and provenance.json.
void write_phantom_bundle(const std::filesystem::path& dir, const PhantomBundle& bundle,
                          const PhantomProvenance& provenance);

PhantomProvenance read_phantom_provenance(const std::filesystem::path& json_path);

} // namespace wmgf
