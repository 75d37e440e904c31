#pragma once

#include <span>
#include <vector>

#include "wmgf/volume.hpp"

namespace wmgf {

/// Two-column design: mean-centered task regressor plus intercept. The
/// centered column is orthogonal to the intercept, so the normal equations
/// decouple into closed form.
struct DesignMatrix {
    std::vector<double> task; // mean-centered
    std::size_t n_columns() const { return 2; }
    std::size_t n_frames() const { return task.size(); }

    /// Sum of squares of the centered task column.
    double task_ss() const;

    /// Centers the regressor; throws std::invalid_argument when the design
    /// is rank-deficient (constant regressor) or has too few frames.
    static DesignMatrix from_regressor(std::span<const double> regressor);

    void validate() const;
};

/// Per-voxel OLS results plus the exact-fit bookkeeping the t-map needs.
struct GlmFit {
    Volume3D beta_task;
    Volume3D beta_intercept;
    Volume3D sigma2;        // residual variance, RSS/dof
    Volume3D zero_variance; // 1 where RSS vanishes relative to ||y||^2
    Volume3D zero_effect;   // 1 where the task explains nothing of ||y||^2
    Mask analysis_mask;     // voxels that were fit (all voxels when no mask given)
    std::size_t dof = 0;
    double inv_task_ss = 0.0; // c^T (X^T X)^{-1} c for the task contrast
};

/// Ordinary least squares per voxel. With a mask, off-mask voxels keep
/// zeros and are excluded from downstream maps.
GlmFit glm_fit(const Volume4D& series, const DesignMatrix& design, const Mask* mask = nullptr,
               unsigned threads = 1);

struct TMap {
    Volume3D t; // +inf sentinel where the fit is exact with nonzero effect
    std::size_t dof = 0;
    Mask analysis_mask;
};

/// t statistic for the task contrast over the fit's analysis mask. Exact
/// fits map to 0 (no effect) or +inf (nonzero effect, excluded from ROC
/// sweep bounds).
TMap t_map(const GlmFit& fit);

} // namespace wmgf
