#pragma once

#include <cstdint>

#include "wmgf/odf.hpp"
#include "wmgf/streamlines.hpp"
#include "wmgf/volume.hpp"

namespace wmgf {

/// Two straight tracts crossing at the volume center: one along x, one
/// along y, each a cylinder of the given radius. ODFs carry an isotropic
/// floor plus a symmetric two-lobe peak per tract passing through the
/// voxel, so the crossing region holds two lobes.
struct SceneConfig {
    std::size_t size = 40; // cubic grid, 1 mm voxels
    double voxel_size_mm = 1.0;
    double tract_radius_mm = 2.0;
    double odf_baseline = 0.1;
    unsigned odf_lobe_power = 8; // even; sharpness of |u . d|^power lobes
    std::size_t streamlines_per_tract = 50;
    double streamline_point_spacing_mm = 2.0;
    std::uint64_t seed = 12345;

    void validate() const;
};

struct Scene {
    Mask mask;
    ODFField odf;
    StreamlineSet streamlines;
    std::array<double, 3> voxel_size_mm{1.0, 1.0, 1.0};
};

Scene make_crossing_tracts_scene(const SceneConfig& config);

/// Two-lobe ODF sample: baseline + (1-baseline) * (u . axis)^power.
double two_lobe_odf_value(Vec3 direction, Vec3 axis, double baseline, unsigned power);

} // namespace wmgf
