#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "wmgf/errors.hpp"
#include "wmgf/geometry.hpp"

namespace wmgf {

/// Dense 3D scalar volume, f64 values, x-fastest ordering.
struct Volume3D {
    Dims3 dims{0, 0, 0};
    std::array<double, 3> voxel_size_mm{1.0, 1.0, 1.0};
    std::vector<double> data;

    std::size_t n_voxels() const { return dims[0] * dims[1] * dims[2]; }
    std::size_t flat(std::size_t x, std::size_t y, std::size_t z) const {
        return flat_index(dims, x, y, z);
    }
    double& at(std::size_t x, std::size_t y, std::size_t z) { return data[flat(x, y, z)]; }
    double at(std::size_t x, std::size_t y, std::size_t z) const { return data[flat(x, y, z)]; }

    static Volume3D zeros(Dims3 dims, std::array<double, 3> voxel_size_mm = {1.0, 1.0, 1.0}) {
        Volume3D v;
        v.dims = dims;
        v.voxel_size_mm = voxel_size_mm;
        v.data.assign(dims[0] * dims[1] * dims[2], 0.0);
        return v;
    }

    void validate() const {
        if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0)
            throw shape_error("Volume3D: dims must be positive");
        for (double s : voxel_size_mm)
            if (!(s > 0.0)) throw shape_error("Volume3D: voxel sizes must be strictly positive");
        if (data.size() != n_voxels())
            throw size_mismatch_error("Volume3D: data length does not equal nx*ny*nz");
    }

    friend bool operator==(const Volume3D&, const Volume3D&) = default;
};

/// Dense 4D time-series, x-fastest within a frame, frames slowest.
struct Volume4D {
    Dims3 dims{0, 0, 0};
    std::size_t n_frames = 0;
    std::array<double, 3> voxel_size_mm{1.0, 1.0, 1.0};
    double tr_seconds = 1.0;
    std::vector<double> data;

    std::size_t n_voxels() const { return dims[0] * dims[1] * dims[2]; }
    std::size_t flat(std::size_t x, std::size_t y, std::size_t z, std::size_t t) const {
        return flat_index(dims, x, y, z) + n_voxels() * t;
    }
    double& at(std::size_t x, std::size_t y, std::size_t z, std::size_t t) {
        return data[flat(x, y, z, t)];
    }
    double at(std::size_t x, std::size_t y, std::size_t z, std::size_t t) const {
        return data[flat(x, y, z, t)];
    }

    double* frame(std::size_t t) { return data.data() + n_voxels() * t; }
    const double* frame(std::size_t t) const { return data.data() + n_voxels() * t; }

    static Volume4D zeros(Dims3 dims, std::size_t n_frames,
                          std::array<double, 3> voxel_size_mm = {1.0, 1.0, 1.0},
                          double tr_seconds = 1.0) {
        Volume4D v;
        v.dims = dims;
        v.n_frames = n_frames;
        v.voxel_size_mm = voxel_size_mm;
        v.tr_seconds = tr_seconds;
        v.data.assign(dims[0] * dims[1] * dims[2] * n_frames, 0.0);
        return v;
    }

    void validate() const {
        if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0)
            throw shape_error("Volume4D: dims must be positive");
        if (n_frames < 2) throw shape_error("Volume4D: nt must be >= 2");
        for (double s : voxel_size_mm)
            if (!(s > 0.0)) throw shape_error("Volume4D: voxel sizes must be strictly positive");
        if (!(tr_seconds > 0.0)) throw shape_error("Volume4D: tr_seconds must be positive");
        if (data.size() != n_voxels() * n_frames)
            throw size_mismatch_error("Volume4D: data length does not equal nx*ny*nz*nt");
    }

    friend bool operator==(const Volume4D&, const Volume4D&) = default;
};

/// Boolean voxel selection over a grid.
struct Mask {
    Dims3 dims{0, 0, 0};
    std::vector<std::uint8_t> voxels; // 0/1, x-fastest

    std::size_t n_voxels() const { return dims[0] * dims[1] * dims[2]; }
    bool at(std::size_t x, std::size_t y, std::size_t z) const {
        return voxels[flat_index(dims, x, y, z)] != 0;
    }
    bool at_flat(std::size_t i) const { return voxels[i] != 0; }

    std::size_t count() const {
        std::size_t n = 0;
        for (auto v : voxels) n += (v != 0);
        return n;
    }

    /// Flat indices of selected voxels, ascending.
    std::vector<std::uint64_t> selected() const {
        std::vector<std::uint64_t> out;
        for (std::size_t i = 0; i < voxels.size(); ++i)
            if (voxels[i]) out.push_back(i);
        return out;
    }

    void validate() const {
        if (voxels.size() != n_voxels())
            throw size_mismatch_error("Mask: voxel flags do not match dims");
        if (count() == 0) throw shape_error("Mask: at least one voxel must be selected");
    }

    /// Nonzero values select voxels.
    static Mask from_volume(const Volume3D& vol) {
        Mask m;
        m.dims = vol.dims;
        m.voxels.resize(vol.data.size());
        for (std::size_t i = 0; i < vol.data.size(); ++i) m.voxels[i] = vol.data[i] != 0.0;
        return m;
    }

    Volume3D to_volume(std::array<double, 3> voxel_size_mm = {1.0, 1.0, 1.0}) const {
        Volume3D v = Volume3D::zeros(dims, voxel_size_mm);
        for (std::size_t i = 0; i < voxels.size(); ++i) v.data[i] = voxels[i] ? 1.0 : 0.0;
        return v;
    }

    friend bool operator==(const Mask&, const Mask&) = default;
};

} // namespace wmgf
