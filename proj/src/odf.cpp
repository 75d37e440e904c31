#include "wmgf/odf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wmgf {

ODFField::ODFField(Dims3 dims, std::vector<Vec3> directions,
                   std::vector<std::uint64_t> voxel_indices, std::vector<double> values)
    : dims_(dims), directions_(std::move(directions)) {
    if (directions_.size() < kMinDirections)
        throw format_error("ODFField: need at least 98 directions, got " +
                           std::to_string(directions_.size()));
    for (const auto& d : directions_)
        if (std::abs(norm(d) - 1.0) > kUnitNormTol)
            throw format_error("ODFField: direction is not unit-norm");

    const std::size_t nd = directions_.size();
    if (values.size() != voxel_indices.size() * nd)
        throw size_mismatch_error("ODFField: values length does not match n_voxels * n_dirs");
    const std::uint64_t total = static_cast<std::uint64_t>(dims[0]) * dims[1] * dims[2];
    for (auto v : voxel_indices)
        if (v >= total) throw shape_error("ODFField: voxel index outside grid");
    for (double v : values)
        if (!(v >= 0.0)) throw format_error("ODFField: ODF values must be non-negative");

    // Canonical row order: ascending flat voxel index.
    std::vector<std::size_t> order(voxel_indices.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return voxel_indices[a] < voxel_indices[b]; });

    voxel_indices_.resize(voxel_indices.size());
    values_.resize(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        voxel_indices_[i] = voxel_indices[order[i]];
        std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(order[i] * nd), nd,
                    values_.begin() + static_cast<std::ptrdiff_t>(i * nd));
    }
    for (std::size_t i = 1; i < voxel_indices_.size(); ++i)
        if (voxel_indices_[i] == voxel_indices_[i - 1])
            throw format_error("ODFField: duplicate voxel index");

    lookup_.reserve(voxel_indices_.size());
    for (std::size_t i = 0; i < voxel_indices_.size(); ++i) lookup_.emplace(voxel_indices_[i], i);
}

std::span<const double> ODFField::row(std::uint64_t voxel_flat) const {
    auto it = lookup_.find(voxel_flat);
    if (it == lookup_.end())
        throw std::out_of_range("ODFField: voxel " + std::to_string(voxel_flat) +
                                " is not covered by the field");
    return {values_.data() + it->second * n_dirs(), n_dirs()};
}

} // namespace wmgf
