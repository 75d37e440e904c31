#pragma once

#include <cstddef>
#include <vector>

#include "wmgf/geometry.hpp"

namespace wmgf {

/// The 5x5x5 voxel neighborhood: 124 integer offsets around the center,
/// collapsing onto 98 direction classes once each offset is reduced to
/// coprime form (offsets like (2,0,0) and (1,0,0) share a class).
class NeighborhoodSpec {
public:
    static constexpr std::size_t kOffsets = 124;
    static constexpr std::size_t kDirectionClasses = 98;

    NeighborhoodSpec();

    const std::vector<IVec3>& offsets() const { return offsets_; }
    const std::vector<IVec3>& unique_directions() const { return unique_directions_; }

    /// Direction class of an offset, as an index into unique_directions().
    std::size_t direction_class(IVec3 offset) const;

    /// Direction class of the opposite offset (used for the j-side of an edge).
    std::size_t opposite_class(std::size_t cls) const { return opposite_class_[cls]; }

    static const NeighborhoodSpec& instance();

private:
    std::vector<IVec3> offsets_;            // fixed scan order: z, then y, then x
    std::vector<IVec3> unique_directions_;  // coprime forms, same scan order
    std::vector<std::size_t> class_of_offset_;
    std::vector<std::size_t> opposite_class_;
};

/// Unit vectors of the 98 direction classes, in NeighborhoodSpec order.
/// The canonical choice of ODF direction set for synthetic fields.
std::vector<Vec3> neighborhood_direction_set();

/// n roughly uniform unit vectors via the golden-angle Fibonacci lattice.
std::vector<Vec3> fibonacci_sphere(std::size_t n);

/// Cosine cone half-angle such that the cone subtends a solid angle of
/// 4*pi/98: 2*pi*(1-cos(theta)) = 4*pi/98 gives cos(theta) = 48/49.
inline constexpr double kConeCos98 = 48.0 / 49.0;

} // namespace wmgf
