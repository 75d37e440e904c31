#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "wmgf/glm.hpp"
#include "wmgf/volume.hpp"

namespace wmgf {

/// Voxels of the analysis mask with t >= t0. Handles +-inf thresholds.
Mask threshold_fixed(const TMap& tmap, double t0);

/// Benjamini-Hochberg step-up over the analysis mask at FDR level q, with
/// two-sided p-values from the t distribution.
Mask threshold_fdr(const TMap& tmap, double q);

/// Indices of hypotheses rejected by the BH step-up procedure at level q.
std::vector<std::size_t> benjamini_hochberg(std::span<const double> p_values, double q);

struct RocCurve {
    std::vector<double> fpr; // nondecreasing along the sweep
    std::vector<double> tpr;
    double auc = 0.0;

    std::size_t size() const { return fpr.size(); }
};

/// Threshold sweep over the observed finite t-range (ranks log-spaced)
/// plus the (0,0) and (1,1) endpoints; scores within the analysis mask
/// against a binary ground truth. AUC by trapezoid rule.
RocCurve roc_curve(const TMap& tmap, const Mask& ground_truth, std::size_t n_thresholds = 200);

inline constexpr std::size_t kRocGridPoints = 1001;

/// Vertical averaging: each curve's TPR is linearly interpolated onto a
/// fixed 1001-point FPR grid, then meaned.
RocCurve average_roc(std::span<const RocCurve> curves);

/// Two-column CSV (fpr,tpr), shortest round-trip decimal representation.
void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path);

} // namespace wmgf
