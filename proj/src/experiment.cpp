#include "wmgf/experiment.hpp"

namespace wmgf {

namespace {

struct Method {
    std::string name;
    double param;
};

} // namespace

ExperimentResult run_roc_experiment(const Mask& wm_mask, const ODFField& odf,
                                    const StreamlineSet& streamlines,
                                    const ExperimentConfig& config) {
    auto [graph, report] = build_graph(wm_mask, odf, config.graph);

    VoxelGraph uniform;
    if (!config.filters.uniform_graph_taus.empty()) uniform = masked_uniform_graph(wm_mask);

    // Shared machinery across phantoms.
    std::vector<Method> methods;
    std::vector<ChebApprox> graph_approx, uniform_approx;
    for (double tau : config.filters.graph_taus) {
        methods.push_back({"graph", tau});
        graph_approx.push_back(cheb_coefficients(HeatKernel{tau}, config.cheb_order));
    }
    for (double fwhm : config.filters.gaussian_fwhms_mm) methods.push_back({"gaussian", fwhm});
    for (double tau : config.filters.uniform_graph_taus) {
        methods.push_back({"uniform-graph", tau});
        uniform_approx.push_back(cheb_coefficients(HeatKernel{tau}, config.cheb_order));
    }
    if (config.filters.include_unfiltered) methods.push_back({"unfiltered", 0.0});

    const auto design = DesignMatrix::from_regressor(unit_regressor(config.paradigm));
    const GridSpec grid{wm_mask.dims, config.voxel_size_mm};

    std::vector<std::vector<RocCurve>> curves(methods.size());
    for (std::size_t p = 0; p < config.n_phantoms; ++p) {
        PhantomSpec spec = config.phantom;
        spec.rng_seed = config.base_seed + p;
        const auto bundle = make_phantom(streamlines, grid, spec, config.paradigm, config.threads);
        const Mask truth = bundle.pattern.ground_truth_mask();

        std::size_t gi = 0, ui = 0;
        for (std::size_t m = 0; m < methods.size(); ++m) {
            Volume4D filtered;
            const auto& method = methods[m];
            if (method.name == "graph")
                filtered = filter_timeseries(graph, graph_approx[gi++], bundle.series, wm_mask,
                                             config.threads);
            else if (method.name == "gaussian")
                filtered = gaussian_filter(
                    bundle.series, GaussianSpec{method.param, 4.0}, config.threads);
            else if (method.name == "uniform-graph")
                filtered = filter_timeseries(uniform, uniform_approx[ui++], bundle.series,
                                             wm_mask, config.threads);
            else
                filtered = bundle.series;

            const auto fit = glm_fit(filtered, design, &wm_mask, config.threads);
            curves[m].push_back(roc_curve(t_map(fit), truth, config.n_thresholds));
        }
    }

    ExperimentResult result;
    result.graph_report = report;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        MethodResult mr;
        mr.method = methods[m].name;
        mr.param = methods[m].param;
        mr.averaged = average_roc(curves[m]);
        result.methods.push_back(std::move(mr));
    }
    return result;
}

} // namespace wmgf
