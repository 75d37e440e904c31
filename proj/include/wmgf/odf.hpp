#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "wmgf/errors.hpp"
#include "wmgf/geometry.hpp"

namespace wmgf {

/// Per-voxel orientation distribution samples over a shared direction set.
/// Rows are kept sorted by flat voxel index so serialization is canonical.
class ODFField {
public:
    static constexpr std::size_t kMinDirections = 98;
    static constexpr double kUnitNormTol = 1e-9;

    ODFField() = default;

    /// voxel_indices[i] owns values[i*n_dirs .. (i+1)*n_dirs). Rows are
    /// sorted by voxel index on construction; validates all invariants.
    ODFField(Dims3 dims, std::vector<Vec3> directions, std::vector<std::uint64_t> voxel_indices,
             std::vector<double> values);

    const Dims3& dims() const { return dims_; }
    const std::vector<Vec3>& directions() const { return directions_; }
    std::size_t n_dirs() const { return directions_.size(); }
    std::size_t n_voxels() const { return voxel_indices_.size(); }
    const std::vector<std::uint64_t>& voxel_indices() const { return voxel_indices_; }
    const std::vector<double>& values() const { return values_; }

    bool has(std::uint64_t voxel_flat) const { return lookup_.contains(voxel_flat); }

    /// ODF samples at a voxel; throws std::out_of_range if not covered.
    std::span<const double> row(std::uint64_t voxel_flat) const;

    friend bool operator==(const ODFField& a, const ODFField& b) {
        return a.dims_ == b.dims_ && a.directions_ == b.directions_ &&
               a.voxel_indices_ == b.voxel_indices_ && a.values_ == b.values_;
    }

private:
    Dims3 dims_{0, 0, 0};
    std::vector<Vec3> directions_;
    std::vector<std::uint64_t> voxel_indices_;
    std::vector<double> values_; // n_voxels x n_dirs, row-major
    std::unordered_map<std::uint64_t, std::size_t> lookup_;
};

} // namespace wmgf
