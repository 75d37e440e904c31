#include "wmgf/glm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wmgf/parallel.hpp"

namespace wmgf {

namespace {
// RSS (or task ESS) below this fraction of ||y||^2 counts as exactly zero.
constexpr double kExactFitRel = 1e-24;
} // namespace

double DesignMatrix::task_ss() const {
    double ss = 0.0;
    for (double v : task) ss += v * v;
    return ss;
}

DesignMatrix DesignMatrix::from_regressor(std::span<const double> regressor) {
    if (regressor.size() < 3)
        throw std::invalid_argument("DesignMatrix: need more frames than columns");
    double mean = 0.0;
    for (double v : regressor) mean += v;
    mean /= static_cast<double>(regressor.size());
    DesignMatrix design;
    design.task.reserve(regressor.size());
    for (double v : regressor) design.task.push_back(v - mean);
    design.validate();
    return design;
}

void DesignMatrix::validate() const {
    if (n_frames() <= n_columns())
        throw std::invalid_argument("DesignMatrix: need more frames than columns");
    if (!(task_ss() > 0.0))
        throw std::invalid_argument("DesignMatrix: rank-deficient design (constant regressor)");
}

GlmFit glm_fit(const Volume4D& series, const DesignMatrix& design, const Mask* mask,
               unsigned threads) {
    series.validate();
    design.validate();
    if (design.n_frames() != series.n_frames)
        throw shape_error("glm_fit: design rows do not match series frames");
    if (mask && mask->dims != series.dims)
        throw shape_error("glm_fit: mask dimensions do not match series");

    const std::size_t n_vox = series.n_voxels();
    const std::size_t n_frames = series.n_frames;
    const double sxx = design.task_ss();
    const double n = static_cast<double>(n_frames);

    GlmFit fit;
    fit.dof = n_frames - design.n_columns();
    fit.inv_task_ss = 1.0 / sxx;
    if (mask) {
        fit.analysis_mask = *mask;
    } else {
        fit.analysis_mask.dims = series.dims;
        fit.analysis_mask.voxels.assign(n_vox, 1);
    }
    fit.beta_task = Volume3D::zeros(series.dims, series.voxel_size_mm);
    fit.beta_intercept = Volume3D::zeros(series.dims, series.voxel_size_mm);
    fit.sigma2 = Volume3D::zeros(series.dims, series.voxel_size_mm);
    fit.zero_variance = Volume3D::zeros(series.dims, series.voxel_size_mm);
    fit.zero_effect = Volume3D::zeros(series.dims, series.voxel_size_mm);

    const double dof = static_cast<double>(fit.dof);
    parallel_for(n_vox, threads, [&](std::size_t v) {
        if (mask && !mask->at_flat(v)) return;
        double sxy = 0.0, sy = 0.0, syy = 0.0;
        for (std::size_t t = 0; t < n_frames; ++t) {
            const double y = series.data[v + n_vox * t];
            sxy += design.task[t] * y;
            sy += y;
            syy += y * y;
        }
        const double beta = sxy / sxx;
        const double intercept = sy / n;
        double rss = 0.0;
        for (std::size_t t = 0; t < n_frames; ++t) {
            const double r = series.data[v + n_vox * t] - beta * design.task[t] - intercept;
            rss += r * r;
        }
        fit.beta_task.data[v] = beta;
        fit.beta_intercept.data[v] = intercept;
        fit.sigma2.data[v] = rss / dof;
        fit.zero_variance.data[v] = (rss <= kExactFitRel * syy) ? 1.0 : 0.0;
        fit.zero_effect.data[v] = (beta * beta * sxx <= kExactFitRel * syy) ? 1.0 : 0.0;
    });
    return fit;
}

TMap t_map(const GlmFit& fit) {
    TMap map;
    map.dof = fit.dof;
    map.t = Volume3D::zeros(fit.beta_task.dims, fit.beta_task.voxel_size_mm);
    map.analysis_mask = fit.analysis_mask;

    for (std::size_t v = 0; v < map.t.data.size(); ++v) {
        if (!map.analysis_mask.at_flat(v)) continue;
        if (fit.zero_variance.data[v] != 0.0) {
            map.t.data[v] = (fit.zero_effect.data[v] != 0.0)
                                ? 0.0
                                : std::numeric_limits<double>::infinity();
            continue;
        }
        const double se = std::sqrt(fit.sigma2.data[v] * fit.inv_task_ss);
        map.t.data[v] = fit.beta_task.data[v] / se;
    }
    return map;
}

} // namespace wmgf
