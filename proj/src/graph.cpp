#include "wmgf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace wmgf {

namespace {

constexpr double kFourPi = 4.0 * 3.14159265358979323846;

double mass_from_membership(std::span<const double> odf_row,
                            std::span<const std::size_t> members, unsigned power,
                            std::size_t n_dirs) {
    double sum = 0.0;
    for (std::size_t k : members) sum += int_pow(odf_row[k], power);
    return (kFourPi / static_cast<double>(n_dirs)) * sum;
}

/// Cone membership per direction class, for the field's direction set.
std::vector<std::vector<std::size_t>> class_memberships(const ODFField& field,
                                                        const GraphBuildConfig& config) {
    const auto& spec = NeighborhoodSpec::instance();
    std::vector<std::vector<std::size_t>> sets;
    sets.reserve(spec.unique_directions().size());
    for (const auto& d : spec.unique_directions())
        sets.push_back(
            solid_angle_membership(field.directions(), to_vec3(d), config.cone_cos_threshold));
    return sets;
}

} // namespace

void GraphBuildConfig::validate() const {
    if (sharpening_power < 1)
        throw std::domain_error("GraphBuildConfig: sharpening_power must be >= 1");
    if (!(cone_cos_threshold > 0.0 && cone_cos_threshold < 1.0))
        throw std::domain_error("GraphBuildConfig: cone_cos_threshold must lie in (0,1)");
    if (!(min_weight_epsilon >= 0.0))
        throw std::domain_error("GraphBuildConfig: min_weight_epsilon must be non-negative");
}

std::vector<std::size_t> solid_angle_membership(std::span<const Vec3> directions, Vec3 r_ij,
                                                double cone_cos_threshold) {
    const double len = norm(r_ij);
    if (!(len > 0.0)) throw std::domain_error("solid_angle_membership: zero offset vector");
    const Vec3 axis = {r_ij.x / len, r_ij.y / len, r_ij.z / len};
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < directions.size(); ++k)
        if (dot(directions[k], axis) >= cone_cos_threshold) members.push_back(k);
    return members;
}

double odf_transition_mass(const ODFField& field, std::uint64_t voxel, IVec3 offset,
                           const GraphBuildConfig& config) {
    if (offset == IVec3{0, 0, 0})
        throw std::domain_error("odf_transition_mass: zero offset");
    if (std::abs(offset.x) > 2 || std::abs(offset.y) > 2 || std::abs(offset.z) > 2)
        throw std::domain_error("odf_transition_mass: offset outside 5x5x5 neighborhood");
    const auto row = field.row(voxel); // throws std::out_of_range off the mask
    const auto members =
        solid_angle_membership(field.directions(), to_vec3(offset), config.cone_cos_threshold);
    return mass_from_membership(row, members, config.sharpening_power, field.n_dirs());
}

double MaxMassCache::at(std::uint64_t voxel) const {
    auto it = max_mass.find(voxel);
    if (it == max_mass.end())
        throw std::out_of_range("MaxMassCache: voxel " + std::to_string(voxel) + " not cached");
    return it->second;
}

MaxMassCache compute_max_mass_cache(const Mask& mask, const ODFField& field,
                                    const GraphBuildConfig& config) {
    config.validate();
    if (mask.dims != field.dims())
        throw shape_error("compute_max_mass_cache: mask/field dimension mismatch");
    const auto& spec = NeighborhoodSpec::instance();
    const auto memberships = class_memberships(field, config);
    const auto dims = mask.dims;

    MaxMassCache cache;
    for (std::uint64_t v : mask.selected()) {
        const auto row = field.row(v);
        const auto [x, y, z] = grid_coords(dims, v);
        double best = 0.0;
        for (std::size_t o = 0; o < spec.offsets().size(); ++o) {
            const IVec3 d = spec.offsets()[o];
            const long tx = static_cast<long>(x) + d.x;
            const long ty = static_cast<long>(y) + d.y;
            const long tz = static_cast<long>(z) + d.z;
            if (tx < 0 || ty < 0 || tz < 0 || tx >= static_cast<long>(dims[0]) ||
                ty >= static_cast<long>(dims[1]) || tz >= static_cast<long>(dims[2]))
                continue;
            if (!mask.at_flat(flat_index(dims, static_cast<std::size_t>(tx),
                                         static_cast<std::size_t>(ty),
                                         static_cast<std::size_t>(tz))))
                continue;
            const std::size_t cls = spec.direction_class(d);
            best = std::max(best, mass_from_membership(row, memberships[cls],
                                                       config.sharpening_power, field.n_dirs()));
        }
        cache.max_mass.emplace(v, best);
    }
    return cache;
}

std::optional<double> edge_weight(const ODFField& field, std::uint64_t i, std::uint64_t j,
                                  const GraphBuildConfig& config, const MaxMassCache& cache) {
    const auto dims = field.dims();
    const auto ci = grid_coords(dims, i);
    const auto cj = grid_coords(dims, j);
    const IVec3 offset = {static_cast<int>(static_cast<long>(cj[0]) - static_cast<long>(ci[0])),
                          static_cast<int>(static_cast<long>(cj[1]) - static_cast<long>(ci[1])),
                          static_cast<int>(static_cast<long>(cj[2]) - static_cast<long>(ci[2]))};
    if (offset == IVec3{0, 0, 0} || std::abs(offset.x) > 2 || std::abs(offset.y) > 2 ||
        std::abs(offset.z) > 2)
        throw std::domain_error("edge_weight: (i,j) is not a 5x5x5 neighborhood pair");

    const double ci_norm = 2.0 * cache.at(i);
    const double cj_norm = 2.0 * cache.at(j);
    if (ci_norm == 0.0 || cj_norm == 0.0) return std::nullopt; // degenerate voxel

    const double w = odf_transition_mass(field, i, offset, config) / ci_norm +
                     odf_transition_mass(field, j, -offset, config) / cj_norm;
    return w;
}

std::pair<VoxelGraph, BuildReport> build_graph(const Mask& mask, const ODFField& field,
                                               const GraphBuildConfig& config) {
    config.validate();
    if (mask.voxels.size() != mask.n_voxels())
        throw shape_error("build_graph: malformed mask");
    if (mask.count() == 0) throw std::domain_error("build_graph: empty mask");
    if (mask.dims != field.dims())
        throw shape_error("build_graph: mask/field dimension mismatch");

    const auto dims = mask.dims;
    const auto& spec = NeighborhoodSpec::instance();
    const auto selected = mask.selected();
    const std::size_t n_masked = selected.size();

    std::unordered_map<std::uint64_t, std::size_t> pos_of;
    pos_of.reserve(n_masked);
    for (std::size_t p = 0; p < n_masked; ++p) pos_of.emplace(selected[p], p);

    std::vector<std::span<const double>> rows(n_masked);
    for (std::size_t p = 0; p < n_masked; ++p)
        rows[p] = field.row(selected[p]); // throws if the field misses a mask voxel

    const auto memberships = class_memberships(field, config);
    const auto mass_at = [&](std::size_t pos, std::size_t cls) {
        return mass_from_membership(rows[pos], memberships[cls], config.sharpening_power,
                                    field.n_dirs());
    };

    // Pass 1: per-voxel max transition mass over mask-restricted neighbors.
    std::vector<double> max_mass(n_masked, 0.0);
    std::vector<std::uint8_t> has_neighbor(n_masked, 0);
    for (std::size_t p = 0; p < n_masked; ++p) {
        const auto [x, y, z] = grid_coords(dims, selected[p]);
        for (std::size_t o = 0; o < spec.offsets().size(); ++o) {
            const IVec3 d = spec.offsets()[o];
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
            has_neighbor[p] = 1;
            const std::size_t cls = spec.direction_class(d);
            max_mass[p] = std::max(max_mass[p], mass_at(p, cls));
        }
    }

    // Pass 2: weights, one evaluation per unordered pair.
    struct Edge {
        std::size_t u, v; // positions within `selected`
        double w;
    };
    std::vector<Edge> edges;
    for (std::size_t p = 0; p < n_masked; ++p) {
        if (max_mass[p] == 0.0) continue;
        const auto [x, y, z] = grid_coords(dims, selected[p]);
        for (std::size_t o = 0; o < spec.offsets().size(); ++o) {
            const IVec3 d = spec.offsets()[o];
            const long tx = static_cast<long>(x) + d.x;
            const long ty = static_cast<long>(y) + d.y;
            const long tz = static_cast<long>(z) + d.z;
            if (tx < 0 || ty < 0 || tz < 0 || tx >= static_cast<long>(dims[0]) ||
                ty >= static_cast<long>(dims[1]) || tz >= static_cast<long>(dims[2]))
                continue;
            const std::uint64_t t = flat_index(dims, static_cast<std::size_t>(tx),
                                               static_cast<std::size_t>(ty),
                                               static_cast<std::size_t>(tz));
            if (t <= selected[p] || !mask.at_flat(t)) continue;
            const std::size_t q = pos_of.at(t);
            if (max_mass[q] == 0.0) continue;
            const std::size_t cls = spec.direction_class(d);
            const double w = mass_at(p, cls) / (2.0 * max_mass[p]) +
                             mass_at(q, spec.opposite_class(cls)) / (2.0 * max_mass[q]);
            if (w > 0.0 && w >= config.min_weight_epsilon) edges.push_back({p, q, w});
        }
    }

    // Isolated voxels are removed; remaining positions become vertex ids.
    std::vector<std::size_t> incident(n_masked, 0);
    for (const auto& e : edges) {
        ++incident[e.u];
        ++incident[e.v];
    }
    std::vector<std::size_t> vertex_of(n_masked, SIZE_MAX);
    VoxelGraph graph;
    graph.dims = dims;
    graph.config = config;
    graph.kind = "odf";
    for (std::size_t p = 0; p < n_masked; ++p) {
        if (incident[p] == 0) continue;
        vertex_of[p] = graph.vertex_to_voxel.size();
        graph.vertex_to_voxel.push_back(selected[p]);
    }

    const std::size_t n = graph.vertex_to_voxel.size();
    std::vector<std::vector<std::pair<std::uint64_t, double>>> adj(n);
    for (std::size_t p = 0; p < n_masked; ++p)
        if (incident[p] > 0) adj[vertex_of[p]].reserve(incident[p]);
    for (const auto& e : edges) {
        const std::size_t u = vertex_of[e.u];
        const std::size_t v = vertex_of[e.v];
        adj[u].push_back({v, e.w});
        adj[v].push_back({u, e.w});
    }

    graph.row_ptr.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(adj[i].begin(), adj[i].end());
        graph.row_ptr[i + 1] = graph.row_ptr[i] + adj[i].size();
        for (const auto& [c, w] : adj[i]) {
            graph.col_idx.push_back(c);
            graph.weights.push_back(w);
        }
    }
    graph.degrees.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::uint64_t k = graph.row_ptr[i]; k < graph.row_ptr[i + 1]; ++k)
            sum += graph.weights[k];
        graph.degrees[i] = sum;
    }

    BuildReport report;
    report.n_masked = n_masked;
    report.n_vertices = n;
    report.n_edges = edges.size();
    report.n_isolated = n_masked - n;
    for (std::size_t p = 0; p < n_masked; ++p)
        if (has_neighbor[p] && max_mass[p] == 0.0) ++report.n_degenerate;
    report.n_components = connected_components(graph).n_components;
    return {std::move(graph), report};
}

double VoxelGraph::weight_at(std::size_t i, std::size_t j) const {
    const auto begin = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
    const auto end = col_idx.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
    const auto it = std::lower_bound(begin, end, static_cast<std::uint64_t>(j));
    if (it == end || *it != j) return 0.0;
    return weights[static_cast<std::size_t>(it - col_idx.begin())];
}

void VoxelGraph::validate() const {
    const std::size_t n = n_vertices();
    if (row_ptr.size() != n + 1 || row_ptr.front() != 0 || row_ptr.back() != col_idx.size())
        throw shape_error("VoxelGraph: malformed CSR row pointers");
    if (weights.size() != col_idx.size() || degrees.size() != n)
        throw shape_error("VoxelGraph: array length mismatch");
    if (!std::is_sorted(vertex_to_voxel.begin(), vertex_to_voxel.end()))
        throw shape_error("VoxelGraph: vertex table must be ascending");

    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::uint64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
            const std::uint64_t j = col_idx[k];
            if (j >= n) throw shape_error("VoxelGraph: column index out of range");
            if (j == i) throw shape_error("VoxelGraph: self-loop");
            if (k > row_ptr[i] && col_idx[k - 1] >= j)
                throw shape_error("VoxelGraph: columns must be sorted and unique");
            const double w = weights[k];
            if (!(w > 0.0 && w <= 1.0))
                throw shape_error("VoxelGraph: edge weight outside (0,1]");
            if (weight_at(j, i) != w)
                throw shape_error("VoxelGraph: adjacency is not exactly symmetric");
            sum += w;
        }
        if (sum != degrees[i])
            throw shape_error("VoxelGraph: stored degree does not equal row sum");
        if (!(degrees[i] > 0.0)) throw shape_error("VoxelGraph: zero-degree vertex");
    }
}

std::uint64_t VoxelGraph::content_hash() const {
    std::uint64_t h = 0xCBF29CE484222325ull;
    const auto absorb = [&h](const void* data, std::size_t bytes) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < bytes; ++i) {
            h ^= p[i];
            h *= 0x100000001B3ull;
        }
    };
    const std::uint64_t meta[4] = {dims[0], dims[1], dims[2], n_vertices()};
    absorb(meta, sizeof(meta));
    absorb(row_ptr.data(), row_ptr.size() * 8);
    absorb(col_idx.data(), col_idx.size() * 8);
    absorb(weights.data(), weights.size() * 8);
    absorb(vertex_to_voxel.data(), vertex_to_voxel.size() * 8);
    return h;
}

void laplacian_apply(const VoxelGraph& graph, std::span<const double> f, std::span<double> out) {
    const std::size_t n = graph.n_vertices();
    if (f.size() != n || out.size() != n)
        throw shape_error("laplacian_apply: signal length must equal vertex count");
    for (double d : graph.degrees)
        if (!(d > 0.0))
            throw std::logic_error("laplacian_apply: zero-degree vertex in graph");

    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = f[i] / std::sqrt(graph.degrees[i]);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::uint64_t k = graph.row_ptr[i]; k < graph.row_ptr[i + 1]; ++k)
            acc += graph.weights[k] * scaled[graph.col_idx[k]];
        out[i] = f[i] - acc / std::sqrt(graph.degrees[i]);
    }
}

std::vector<double> laplacian_apply(const VoxelGraph& graph, const std::vector<double>& f) {
    std::vector<double> out(f.size());
    laplacian_apply(graph, f, out);
    return out;
}

ComponentLabeling connected_components(const VoxelGraph& graph) {
    const std::size_t n = graph.n_vertices();
    ComponentLabeling result;
    result.labels.assign(n, UINT32_MAX);
    std::deque<std::size_t> frontier;
    for (std::size_t s = 0; s < n; ++s) {
        if (result.labels[s] != UINT32_MAX) continue;
        const auto label = static_cast<std::uint32_t>(result.n_components++);
        result.labels[s] = label;
        frontier.push_back(s);
        while (!frontier.empty()) {
            const std::size_t i = frontier.front();
            frontier.pop_front();
            for (std::uint64_t k = graph.row_ptr[i]; k < graph.row_ptr[i + 1]; ++k) {
                const std::size_t j = graph.col_idx[k];
                if (result.labels[j] == UINT32_MAX) {
                    result.labels[j] = label;
                    frontier.push_back(j);
                }
            }
        }
    }
    return result;
}

VoxelGraph graph_from_edges(std::size_t n_vertices,
                            std::span<const std::tuple<std::uint64_t, std::uint64_t, double>> edges,
                            std::string kind) {
    std::vector<std::vector<std::pair<std::uint64_t, double>>> adj(n_vertices);
    for (const auto& [u, v, w] : edges) {
        if (u >= n_vertices || v >= n_vertices)
            throw shape_error("graph_from_edges: vertex index out of range");
        if (u == v) throw shape_error("graph_from_edges: self-loop");
        if (!(w > 0.0 && w <= 1.0))
            throw shape_error("graph_from_edges: edge weight outside (0,1]");
        adj[u].push_back({v, w});
        adj[v].push_back({u, w});
    }

    VoxelGraph graph;
    graph.dims = {n_vertices, 1, 1};
    graph.kind = std::move(kind);
    graph.vertex_to_voxel.resize(n_vertices);
    std::iota(graph.vertex_to_voxel.begin(), graph.vertex_to_voxel.end(), 0);
    graph.row_ptr.assign(n_vertices + 1, 0);
    for (std::size_t i = 0; i < n_vertices; ++i) {
        auto& row = adj[i];
        std::sort(row.begin(), row.end());
        for (std::size_t k = 1; k < row.size(); ++k)
            if (row[k].first == row[k - 1].first)
                throw shape_error("graph_from_edges: duplicate edge");
        if (row.empty()) throw shape_error("graph_from_edges: zero-degree vertex");
        graph.row_ptr[i + 1] = graph.row_ptr[i] + row.size();
        double sum = 0.0;
        for (const auto& [c, w] : row) {
            graph.col_idx.push_back(c);
            graph.weights.push_back(w);
            sum += w;
        }
        graph.degrees.push_back(sum);
    }
    return graph;
}

} // namespace wmgf
