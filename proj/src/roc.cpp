#include "wmgf/roc.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wmgf/stats.hpp"

namespace wmgf {

namespace {

void append_double(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

double trapezoid_auc(std::span<const double> x, std::span<const double> y) {
    double auc = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        auc += (x[i] - x[i - 1]) * (y[i] + y[i - 1]) * 0.5;
    return auc;
}

/// Upper staircase envelope: strictly increasing fpr, max tpr per fpr.
void compress_envelope(const RocCurve& curve, std::vector<double>& fpr,
                       std::vector<double>& tpr) {
    fpr.clear();
    tpr.clear();
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!fpr.empty() && curve.fpr[i] == fpr.back())
            tpr.back() = std::max(tpr.back(), curve.tpr[i]);
        else {
            fpr.push_back(curve.fpr[i]);
            tpr.push_back(curve.tpr[i]);
        }
    }
}

} // namespace

Mask threshold_fixed(const TMap& tmap, double t0) {
    Mask out;
    out.dims = tmap.t.dims;
    out.voxels.assign(tmap.t.data.size(), 0);
    for (std::size_t v = 0; v < tmap.t.data.size(); ++v)
        out.voxels[v] = tmap.analysis_mask.at_flat(v) && tmap.t.data[v] >= t0;
    return out;
}

std::vector<std::size_t> benjamini_hochberg(std::span<const double> p_values, double q) {
    if (!(q > 0.0 && q < 1.0))
        throw std::domain_error("benjamini_hochberg: q must lie in (0,1)");
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::domain_error("benjamini_hochberg: p-value outside [0,1]");

    const std::size_t m = p_values.size();
    if (m == 0) return {};
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    // Largest k with p_(k) <= k*q/m; reject everything at or below that p.
    double cutoff = -1.0;
    for (std::size_t k = m; k >= 1; --k) {
        if (p_values[order[k - 1]] <=
            static_cast<double>(k) * q / static_cast<double>(m)) {
            cutoff = p_values[order[k - 1]];
            break;
        }
    }
    std::vector<std::size_t> rejected;
    if (cutoff < 0.0) return rejected;
    for (std::size_t i = 0; i < m; ++i)
        if (p_values[i] <= cutoff) rejected.push_back(i);
    return rejected;
}

Mask threshold_fdr(const TMap& tmap, double q) {
    const auto mask_voxels = tmap.analysis_mask.selected();
    std::vector<double> p(mask_voxels.size());
    for (std::size_t i = 0; i < mask_voxels.size(); ++i)
        p[i] = t_two_sided_p(tmap.t.data[mask_voxels[i]], static_cast<double>(tmap.dof));

    Mask out;
    out.dims = tmap.t.dims;
    out.voxels.assign(tmap.t.data.size(), 0);
    for (std::size_t idx : benjamini_hochberg(p, q)) out.voxels[mask_voxels[idx]] = 1;
    return out;
}

RocCurve roc_curve(const TMap& tmap, const Mask& ground_truth, std::size_t n_thresholds) {
    if (ground_truth.dims != tmap.t.dims)
        throw shape_error("roc_curve: ground truth dimensions do not match t-map");
    if (n_thresholds < 2) throw std::domain_error("roc_curve: need at least two thresholds");

    struct Item {
        double t;
        bool positive;
    };
    std::vector<Item> items;
    std::vector<double> finite_t;
    std::size_t n_pos = 0, n_neg = 0;
    for (std::size_t v = 0; v < tmap.t.data.size(); ++v) {
        if (!tmap.analysis_mask.at_flat(v)) continue;
        const bool positive = ground_truth.at_flat(v);
        items.push_back({tmap.t.data[v], positive});
        if (std::isfinite(tmap.t.data[v])) finite_t.push_back(tmap.t.data[v]);
        positive ? ++n_pos : ++n_neg;
    }
    if (n_pos == 0 || n_neg == 0)
        throw std::domain_error("roc_curve: degenerate ground truth (all one class)");

    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.t > b.t; });
    std::sort(finite_t.begin(), finite_t.end(), std::greater<>());

    // Thresholds at log-spaced ranks of the finite t values.
    std::vector<double> thresholds;
    const std::size_t m = finite_t.size();
    if (m > 0) {
        const double log_m = std::log(static_cast<double>(m));
        for (std::size_t i = 0; i < n_thresholds; ++i) {
            const double frac =
                (n_thresholds == 1) ? 1.0
                                    : static_cast<double>(i) / static_cast<double>(n_thresholds - 1);
            auto rank = static_cast<std::size_t>(std::llround(std::exp(frac * log_m)));
            rank = std::clamp<std::size_t>(rank, 1, m);
            thresholds.push_back(finite_t[rank - 1]);
        }
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    }

    RocCurve curve;
    curve.fpr.push_back(0.0);
    curve.tpr.push_back(0.0);
    std::size_t cursor = 0, tp = 0, fp = 0;
    for (double theta : thresholds) {
        while (cursor < items.size() && items[cursor].t >= theta) {
            items[cursor].positive ? ++tp : ++fp;
            ++cursor;
        }
        curve.fpr.push_back(static_cast<double>(fp) / static_cast<double>(n_neg));
        curve.tpr.push_back(static_cast<double>(tp) / static_cast<double>(n_pos));
    }
    curve.fpr.push_back(1.0);
    curve.tpr.push_back(1.0);
    curve.auc = trapezoid_auc(curve.fpr, curve.tpr);
    return curve;
}

RocCurve average_roc(std::span<const RocCurve> curves) {
    if (curves.empty()) throw std::domain_error("average_roc: empty curve list");

    RocCurve out;
    out.fpr.resize(kRocGridPoints);
    out.tpr.assign(kRocGridPoints, 0.0);
    for (std::size_t g = 0; g < kRocGridPoints; ++g)
        out.fpr[g] = static_cast<double>(g) / static_cast<double>(kRocGridPoints - 1);

    std::vector<double> fpr, tpr;
    for (const auto& curve : curves) {
        if (curve.size() < 2 || curve.fpr.front() != 0.0 || curve.fpr.back() != 1.0)
            throw std::domain_error("average_roc: curve must span FPR in [0,1]");
        compress_envelope(curve, fpr, tpr);
        for (std::size_t g = 0; g < kRocGridPoints; ++g) {
            const double f = out.fpr[g];
            const auto it = std::lower_bound(fpr.begin(), fpr.end(), f);
            const std::size_t hi = static_cast<std::size_t>(it - fpr.begin());
            double value;
            if (hi == 0)
                value = tpr.front();
            else if (fpr[hi] == f)
                value = tpr[hi];
            else {
                const double f0 = fpr[hi - 1], f1 = fpr[hi];
                value = tpr[hi - 1] + (tpr[hi] - tpr[hi - 1]) * (f - f0) / (f1 - f0);
            }
            out.tpr[g] += value;
        }
    }
    for (double& v : out.tpr) v /= static_cast<double>(curves.size());
    out.auc = trapezoid_auc(out.fpr, out.tpr);
    return out;
}

void write_roc_csv(const RocCurve& curve, const std::filesystem::path& path) {
    std::string body = "fpr,tpr\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
        append_double(body, curve.fpr[i]);
        body.push_back(',');
        append_double(body, curve.tpr[i]);
        body.push_back('\n');
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    os << body;
    if (!os) throw io_error("write failed: " + path.string());
}

} // namespace wmgf
