#pragma once

#include "wmgf/graph.hpp"
#include "wmgf/volume.hpp"

namespace wmgf {

struct GaussianSpec {
    double fwhm_mm = 2.0;
    double truncation_radius_sigmas = 4.0;

    void validate() const;
};

inline constexpr double kFwhmToSigma = 0.42466090014400953; // 1 / (2 sqrt(2 ln 2))

/// Separable Gaussian smoothing with unit-sum kernels. Near the volume
/// boundary each pass renormalizes over its in-bounds support, so constant
/// volumes stay constant and edge voxels are not attenuated.
Volume3D gaussian_filter(const Volume3D& vol, const GaussianSpec& spec);

/// Frame-by-frame smoothing of a time-series.
Volume4D gaussian_filter(const Volume4D& vol, const GaussianSpec& spec, unsigned threads = 1);

/// Morphology-only baseline: the 5x5x5 neighborhood graph over the mask
/// with every edge weight 1. Heat-kernel filtering on it realizes the
/// tissue-restricted filter that ignores microstructure. Isolated voxels
/// are removed, matching build_graph.
VoxelGraph masked_uniform_graph(const Mask& mask);

} // namespace wmgf
