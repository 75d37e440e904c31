#include "wmgf/neighborhood.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace wmgf {

namespace {

IVec3 coprime_form(IVec3 v) {
    const int g = std::gcd(std::gcd(std::abs(v.x), std::abs(v.y)), std::abs(v.z));
    return {v.x / g, v.y / g, v.z / g};
}

std::tuple<int, int, int> key(IVec3 v) { return {v.z, v.y, v.x}; }

} // namespace

NeighborhoodSpec::NeighborhoodSpec() {
    offsets_.reserve(kOffsets);
    for (int dz = -2; dz <= 2; ++dz)
        for (int dy = -2; dy <= 2; ++dy)
            for (int dx = -2; dx <= 2; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                offsets_.push_back({dx, dy, dz});
            }

    std::map<std::tuple<int, int, int>, std::size_t> class_index;
    class_of_offset_.resize(offsets_.size());
    for (std::size_t i = 0; i < offsets_.size(); ++i) {
        const IVec3 reduced = coprime_form(offsets_[i]);
        auto [it, inserted] = class_index.try_emplace(key(reduced), unique_directions_.size());
        if (inserted) unique_directions_.push_back(reduced);
        class_of_offset_[i] = it->second;
    }

    opposite_class_.resize(unique_directions_.size());
    for (std::size_t c = 0; c < unique_directions_.size(); ++c)
        opposite_class_[c] = class_index.at(key(-unique_directions_[c]));
}

std::size_t NeighborhoodSpec::direction_class(IVec3 offset) const {
    if (offset.x == 0 && offset.y == 0 && offset.z == 0)
        throw std::domain_error("direction_class: zero offset");
    if (std::abs(offset.x) > 2 || std::abs(offset.y) > 2 || std::abs(offset.z) > 2)
        throw std::domain_error("direction_class: offset outside 5x5x5 neighborhood");
    // Offsets are enumerated x-fastest over [-2,2]^3 with the center removed.
    const std::size_t raw = static_cast<std::size_t>(offset.x + 2) +
                            5 * static_cast<std::size_t>(offset.y + 2) +
                            25 * static_cast<std::size_t>(offset.z + 2);
    return class_of_offset_[raw < 62 ? raw : raw - 1];
}

const NeighborhoodSpec& NeighborhoodSpec::instance() {
    static const NeighborhoodSpec spec;
    return spec;
}

std::vector<Vec3> neighborhood_direction_set() {
    const auto& dirs = NeighborhoodSpec::instance().unique_directions();
    std::vector<Vec3> out;
    out.reserve(dirs.size());
    for (const auto& d : dirs) out.push_back(normalized(to_vec3(d)));
    return out;
}

std::vector<Vec3> fibonacci_sphere(std::size_t n) {
    std::vector<Vec3> out;
    out.reserve(n);
    const double golden_angle = M_PI * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(n);
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden_angle * static_cast<double>(i);
        out.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return out;
}

} // namespace wmgf
