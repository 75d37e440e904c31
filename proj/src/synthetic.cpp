#include "wmgf/synthetic.hpp"

#include <cmath>
#include <stdexcept>

#include "wmgf/neighborhood.hpp"
#include "wmgf/rng.hpp"

namespace wmgf {

void SceneConfig::validate() const {
    if (size < 8) throw std::domain_error("SceneConfig: grid too small");
    if (!(voxel_size_mm > 0.0)) throw std::domain_error("SceneConfig: voxel size must be positive");
    if (!(tract_radius_mm > 0.0)) throw std::domain_error("SceneConfig: radius must be positive");
    if (!(odf_baseline > 0.0 && odf_baseline < 1.0))
        throw std::domain_error("SceneConfig: odf_baseline must lie in (0,1)");
    if (odf_lobe_power % 2 != 0)
        throw std::domain_error("SceneConfig: lobe power must be even (antipodal symmetry)");
    if (streamlines_per_tract < 1)
        throw std::domain_error("SceneConfig: need at least one streamline per tract");
    if (!(streamline_point_spacing_mm > 0.0))
        throw std::domain_error("SceneConfig: point spacing must be positive");
}

double two_lobe_odf_value(Vec3 direction, Vec3 axis, double baseline, unsigned power) {
    return baseline + (1.0 - baseline) * int_pow(dot(direction, axis), power);
}

Scene make_crossing_tracts_scene(const SceneConfig& config) {
    config.validate();
    const std::size_t n = config.size;
    const double vs = config.voxel_size_mm;
    const Dims3 dims = {n, n, n};
    const double center = 0.5 * static_cast<double>(n) * vs;
    const double radius2 = config.tract_radius_mm * config.tract_radius_mm;

    const Vec3 axis_a = {1.0, 0.0, 0.0}; // tract A along x
    const Vec3 axis_b = {0.0, 1.0, 0.0}; // tract B along y

    Scene scene;
    scene.voxel_size_mm = {vs, vs, vs};
    scene.mask.dims = dims;
    scene.mask.voxels.assign(n * n * n, 0);

    const auto directions = neighborhood_direction_set();
    std::vector<std::uint64_t> odf_voxels;
    std::vector<double> odf_values;

    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x) {
                const Vec3 c = {(static_cast<double>(x) + 0.5) * vs,
                                (static_cast<double>(y) + 0.5) * vs,
                                (static_cast<double>(z) + 0.5) * vs};
                const double da = (c.y - center) * (c.y - center) +
                                  (c.z - center) * (c.z - center); // distance^2 to A axis
                const double db = (c.x - center) * (c.x - center) +
                                  (c.z - center) * (c.z - center); // distance^2 to B axis
                const bool in_a = da <= radius2;
                const bool in_b = db <= radius2;
                if (!in_a && !in_b) continue;

                const std::uint64_t flat = flat_index(dims, x, y, z);
                scene.mask.voxels[flat] = 1;
                odf_voxels.push_back(flat);
                for (const Vec3& u : directions) {
                    double v = config.odf_baseline;
                    if (in_a)
                        v += (1.0 - config.odf_baseline) *
                             int_pow(dot(u, axis_a), config.odf_lobe_power);
                    if (in_b)
                        v += (1.0 - config.odf_baseline) *
                             int_pow(dot(u, axis_b), config.odf_lobe_power);
                    odf_values.push_back(v);
                }
            }

    scene.odf = ODFField(dims, directions, std::move(odf_voxels), std::move(odf_values));

    // Streamlines parallel to each tract axis, offsets drawn uniformly in
    // a disk of 0.8 * radius so lines stay inside the cylinder.
    const double extent = static_cast<double>(n) * vs;
    const double offset_radius = 0.8 * config.tract_radius_mm;
    const auto n_points =
        static_cast<std::size_t>(std::floor(extent / config.streamline_point_spacing_mm)) + 1;

    // Interleaved A,B,A,B,... so any prefix of the set covers both tracts.
    for (std::size_t i = 0; i < config.streamlines_per_tract; ++i) {
        for (int tract = 0; tract < 2; ++tract) {
            Rng rng(config.seed, static_cast<std::uint64_t>(tract) * 100000ull + i);
            const double r = offset_radius * std::sqrt(rng.next_uniform());
            const double phi = 2.0 * M_PI * rng.next_uniform();
            const double u = center + r * std::cos(phi);
            const double w = center + r * std::sin(phi);
            Streamline line;
            line.reserve(n_points);
            for (std::size_t k = 0; k < n_points; ++k) {
                const double s =
                    std::min(static_cast<double>(k) * config.streamline_point_spacing_mm,
                             extent - 1e-9);
                if (tract == 0)
                    line.push_back({s, u, w});
                else
                    line.push_back({u, s, w});
            }
            scene.streamlines.streamlines.push_back(std::move(line));
        }
    }
    scene.streamlines.validate();
    return scene;
}

} // namespace wmgf
