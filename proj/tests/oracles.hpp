#pragma once

// Independent re-evaluations of spec formulas, shared by the unit and
// acceptance suites. These deliberately avoid the library's aggregation
// machinery: masses are summed by direct direction scans and graphs are
// assembled by an O(N^2) double loop.

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "wmgf/graph.hpp"
#include "wmgf/odf.hpp"

namespace wmgf::test {

inline constexpr double kOracleFourPi = 4.0 * 3.14159265358979323846;

/// Transition mass by direct scan over the direction set.
inline double oracle_mass(const ODFField& field, std::uint64_t voxel, IVec3 offset,
                          unsigned power, double threshold) {
    const auto row = field.row(voxel);
    const Vec3 axis = normalized(to_vec3(offset));
    double sum = 0.0;
    for (std::size_t k = 0; k < field.n_dirs(); ++k)
        if (dot(field.directions()[k], axis) >= threshold) sum += int_pow(row[k], power);
    return (kOracleFourPi / static_cast<double>(field.n_dirs())) * sum;
}

/// Dense O(N^2) graph builder: double loop over masked voxel pairs.
inline std::map<std::pair<std::uint64_t, std::uint64_t>, double>
oracle_dense_weights(const Mask& mask, const ODFField& field, const GraphBuildConfig& config) {
    const auto selected = mask.selected();
    const auto dims = mask.dims;

    const auto neighbor_offset = [&](std::uint64_t a, std::uint64_t b, IVec3& offset) {
        const auto ca = grid_coords(dims, a);
        const auto cb = grid_coords(dims, b);
        const long dx = static_cast<long>(cb[0]) - static_cast<long>(ca[0]);
        const long dy = static_cast<long>(cb[1]) - static_cast<long>(ca[1]);
        const long dz = static_cast<long>(cb[2]) - static_cast<long>(ca[2]);
        if (dx == 0 && dy == 0 && dz == 0) return false;
        if (std::abs(dx) > 2 || std::abs(dy) > 2 || std::abs(dz) > 2) return false;
        offset = {static_cast<int>(dx), static_cast<int>(dy), static_cast<int>(dz)};
        return true;
    };

    std::map<std::uint64_t, double> max_mass;
    for (std::uint64_t v : selected) {
        double best = 0.0;
        for (std::uint64_t u : selected) {
            IVec3 offset;
            if (!neighbor_offset(v, u, offset)) continue;
            best = std::max(best, oracle_mass(field, v, offset, config.sharpening_power,
                                              config.cone_cos_threshold));
        }
        max_mass[v] = best;
    }

    std::map<std::pair<std::uint64_t, std::uint64_t>, double> weights;
    for (std::size_t a = 0; a < selected.size(); ++a) {
        for (std::size_t b = a + 1; b < selected.size(); ++b) {
            const std::uint64_t i = selected[a], j = selected[b];
            IVec3 offset;
            if (!neighbor_offset(i, j, offset)) continue;
            if (max_mass[i] == 0.0 || max_mass[j] == 0.0) continue;
            const double pi = oracle_mass(field, i, offset, config.sharpening_power,
                                          config.cone_cos_threshold);
            const double pj = oracle_mass(field, j, -offset, config.sharpening_power,
                                          config.cone_cos_threshold);
            const double w = pi / (2.0 * max_mass[i]) + pj / (2.0 * max_mass[j]);
            if (w > 0.0 && w >= config.min_weight_epsilon) weights[{i, j}] = w;
        }
    }
    return weights;
}

/// Brute-force BH step-up: sort, find the largest k with p_(k) <= k q / m.
inline std::vector<std::size_t> oracle_bh(std::span<const double> p, double q) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
    std::size_t k_star = 0;
    for (std::size_t k = 1; k <= m; ++k)
        if (p[order[k - 1]] <= static_cast<double>(k) * q / static_cast<double>(m)) k_star = k;
    std::vector<std::size_t> rejected;
    if (k_star == 0) return rejected;
    const double cutoff = p[order[k_star - 1]];
    for (std::size_t i = 0; i < m; ++i)
        if (p[i] <= cutoff) rejected.push_back(i);
    return rejected;
}

} // namespace wmgf::test
