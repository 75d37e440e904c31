#pragma once

#include <string>
#include <vector>

#include "wmgf/baseline_filters.hpp"
#include "wmgf/glm.hpp"
#include "wmgf/graph.hpp"
#include "wmgf/phantom.hpp"
#include "wmgf/roc.hpp"
#include "wmgf/spectral.hpp"

namespace wmgf {

/// Filter grid for the phantom ROC benchmark.
struct ExperimentFilters {
    std::vector<double> graph_taus{1.3, 1.4, 2.2, 3.3};
    std::vector<double> gaussian_fwhms_mm{2.0, 4.0, 6.0};
    std::vector<double> uniform_graph_taus{};
    bool include_unfiltered = true;
};

struct ExperimentConfig {
    GraphBuildConfig graph;
    PhantomSpec phantom;        // rng_seed is taken per phantom: base_seed + index
    std::array<double, 3> voxel_size_mm{1.0, 1.0, 1.0};
    std::uint64_t base_seed = 0;
    std::size_t n_phantoms = 10;
    BlockParadigm paradigm;
    ExperimentFilters filters;
    unsigned cheb_order = 50;
    std::size_t n_thresholds = 200;
    unsigned threads = 1;
};

struct MethodResult {
    std::string method; // "graph" | "gaussian" | "uniform-graph" | "unfiltered"
    double param = 0.0; // tau or FWHM in mm; 0 for unfiltered
    RocCurve averaged;  // across phantoms
};

struct ExperimentResult {
    std::vector<MethodResult> methods;
    BuildReport graph_report;
};

/// The phantom benchmark: synthesize n_phantoms noisy series from the
/// streamlines, run each through every filter in the grid, GLM-map them,
/// and average per-method ROC curves across phantoms. T-maps for every
/// method are scored over the same white-matter mask.
ExperimentResult run_roc_experiment(const Mask& wm_mask, const ODFField& odf,
                                    const StreamlineSet& streamlines,
                                    const ExperimentConfig& config);

} // namespace wmgf
