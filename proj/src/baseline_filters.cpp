#include "wmgf/baseline_filters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wmgf/parallel.hpp"

namespace wmgf {

namespace {

constexpr double kDeltaSigmaVox = 1e-6; // below this the kernel degenerates to a delta

std::vector<double> gaussian_kernel(double sigma_vox, double truncation) {
    const long radius = std::max(1L, static_cast<long>(std::ceil(truncation * sigma_vox)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (long t = -radius; t <= radius; ++t) {
        const double w = std::exp(-static_cast<double>(t * t) / (2.0 * sigma_vox * sigma_vox));
        kernel[static_cast<std::size_t>(t + radius)] = w;
        sum += w;
    }
    for (double& w : kernel) w /= sum;
    return kernel;
}

/// One renormalized convolution pass along `axis` of a 3D block.
void axis_pass(const Dims3& dims, std::vector<double>& data, int axis,
               const std::vector<double>& kernel) {
    const long radius = static_cast<long>(kernel.size() / 2);
    const long extent = static_cast<long>(dims[static_cast<std::size_t>(axis)]);
    const std::size_t strides[3] = {1, dims[0], dims[0] * dims[1]};
    const std::size_t stride = strides[axis];

    // Iterate all lines along `axis`.
    const int u = (axis == 0) ? 1 : 0;
    const int v = (axis == 2) ? 1 : 2;
    const std::size_t nu = dims[static_cast<std::size_t>(u)];
    const std::size_t nv = dims[static_cast<std::size_t>(v)];

    std::vector<double> line(static_cast<std::size_t>(extent));
    for (std::size_t b = 0; b < nv; ++b) {
        for (std::size_t a = 0; a < nu; ++a) {
            const std::size_t base = a * strides[u] + b * strides[v];
            for (long i = 0; i < extent; ++i)
                line[static_cast<std::size_t>(i)] = data[base + static_cast<std::size_t>(i) * stride];
            for (long i = 0; i < extent; ++i) {
                const long lo = std::max(-radius, -i);
                const long hi = std::min(radius, extent - 1 - i);
                double acc = 0.0, wsum = 0.0;
                for (long t = lo; t <= hi; ++t) {
                    const double w = kernel[static_cast<std::size_t>(t + radius)];
                    acc += w * line[static_cast<std::size_t>(i + t)];
                    wsum += w;
                }
                data[base + static_cast<std::size_t>(i) * stride] = acc / wsum;
            }
        }
    }
}

void smooth_block(const Dims3& dims, const std::array<double, 3>& voxel_size_mm,
                  std::vector<double>& data, const GaussianSpec& spec) {
    const double sigma_mm = spec.fwhm_mm * kFwhmToSigma;
    for (int axis = 0; axis < 3; ++axis) {
        const double sigma_vox = sigma_mm / voxel_size_mm[static_cast<std::size_t>(axis)];
        if (sigma_vox < kDeltaSigmaVox) continue;
        axis_pass(dims, data, axis, gaussian_kernel(sigma_vox, spec.truncation_radius_sigmas));
    }
}

} // namespace

void GaussianSpec::validate() const {
    if (!(fwhm_mm > 0.0)) throw std::domain_error("GaussianSpec: fwhm_mm must be positive");
    if (!(truncation_radius_sigmas > 0.0))
        throw std::domain_error("GaussianSpec: truncation radius must be positive");
}

Volume3D gaussian_filter(const Volume3D& vol, const GaussianSpec& spec) {
    spec.validate();
    vol.validate();
    Volume3D out = vol;
    smooth_block(out.dims, out.voxel_size_mm, out.data, spec);
    return out;
}

Volume4D gaussian_filter(const Volume4D& vol, const GaussianSpec& spec, unsigned threads) {
    spec.validate();
    vol.validate();
    Volume4D out = vol;
    const std::size_t n_vox = out.n_voxels();
    parallel_for(out.n_frames, threads, [&](std::size_t t) {
        std::vector<double> frame(out.frame(t), out.frame(t) + n_vox);
        smooth_block(out.dims, out.voxel_size_mm, frame, spec);
        std::copy(frame.begin(), frame.end(), out.frame(t));
    });
    return out;
}

VoxelGraph masked_uniform_graph(const Mask& mask) {
    if (mask.voxels.size() != mask.n_voxels())
        throw shape_error("masked_uniform_graph: malformed mask");
    if (mask.count() == 0) throw std::domain_error("masked_uniform_graph: empty mask");

    const auto dims = mask.dims;
    const auto& spec = NeighborhoodSpec::instance();
    const auto selected = mask.selected();

    std::unordered_map<std::uint64_t, std::size_t> pos_of;
    pos_of.reserve(selected.size());
    for (std::size_t p = 0; p < selected.size(); ++p) pos_of.emplace(selected[p], p);

    // Neighbor lists per masked voxel; isolated voxels are dropped.
    std::vector<std::vector<std::size_t>> nbrs(selected.size());
    for (std::size_t p = 0; p < selected.size(); ++p) {
        const auto [x, y, z] = grid_coords(dims, selected[p]);
        for (const IVec3& d : spec.offsets()) {
            const long tx = static_cast<long>(x) + d.x;
            const long ty = static_cast<long>(y) + d.y;
            const long tz = static_cast<long>(z) + d.z;
            if (tx < 0 || ty < 0 || tz < 0 || tx >= static_cast<long>(dims[0]) ||
                ty >= static_cast<long>(dims[1]) || tz >= static_cast<long>(dims[2]))
                continue;
            const std::uint64_t t = flat_index(dims, static_cast<std::size_t>(tx),
                                               static_cast<std::size_t>(ty),
                                               static_cast<std::size_t>(tz));
            if (!mask.at_flat(t)) continue;
            nbrs[p].push_back(pos_of.at(t));
        }
    }

    VoxelGraph graph;
    graph.dims = dims;
    graph.kind = "uniform";
    std::vector<std::size_t> vertex_of(selected.size(), SIZE_MAX);
    for (std::size_t p = 0; p < selected.size(); ++p) {
        if (nbrs[p].empty()) continue;
        vertex_of[p] = graph.vertex_to_voxel.size();
        graph.vertex_to_voxel.push_back(selected[p]);
    }

    const std::size_t n = graph.vertex_to_voxel.size();
    graph.row_ptr.assign(n + 1, 0);
    for (std::size_t p = 0, i = 0; p < selected.size(); ++p) {
        if (vertex_of[p] == SIZE_MAX) continue;
        auto cols = nbrs[p];
        for (auto& c : cols) c = vertex_of[c]; // neighbors of a vertex are never isolated
        std::sort(cols.begin(), cols.end());
        graph.row_ptr[i + 1] = graph.row_ptr[i] + cols.size();
        for (std::size_t c : cols) {
            graph.col_idx.push_back(c);
            graph.weights.push_back(1.0);
        }
        graph.degrees.push_back(static_cast<double>(cols.size()));
        ++i;
    }
    return graph;
}

} // namespace wmgf
