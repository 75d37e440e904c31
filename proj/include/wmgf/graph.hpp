#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wmgf/geometry.hpp"
#include "wmgf/neighborhood.hpp"
#include "wmgf/odf.hpp"
#include "wmgf/volume.hpp"

namespace wmgf {

struct GraphBuildConfig {
    unsigned sharpening_power = 2;          // ODF sharpening exponent, >= 1
    double cone_cos_threshold = kConeCos98; // cone membership cutoff, in (0,1)
    double min_weight_epsilon = 0.0;        // weights below this are dropped

    void validate() const;
    friend bool operator==(const GraphBuildConfig&, const GraphBuildConfig&) = default;
};

/// Sparse undirected weighted graph over masked voxels. Symmetric CSR with
/// sorted column indices; construction order is deterministic (ascending
/// flat voxel index), so serialized graphs are byte-reproducible.
struct VoxelGraph {
    Dims3 dims{0, 0, 0};
    std::vector<std::uint64_t> vertex_to_voxel; // vertex id -> flat voxel index, ascending
    std::vector<std::uint64_t> row_ptr;         // size n_vertices + 1
    std::vector<std::uint64_t> col_idx;         // sorted within each row
    std::vector<double> weights;                // in (0, 1]
    std::vector<double> degrees;                // row sums, summed in column order
    GraphBuildConfig config;
    std::string kind = "odf"; // "odf" | "uniform" | "adhoc"

    std::size_t n_vertices() const { return vertex_to_voxel.size(); }
    std::size_t n_edges() const { return col_idx.size() / 2; }

    /// Weight of directed entry (i,j), or 0 if absent. Binary search within row i.
    double weight_at(std::size_t i, std::size_t j) const;

    /// Full structural validation: symmetry (bit-exact), sorted unique columns,
    /// no self-loops, weights in (0,1], positive degrees equal to row sums.
    void validate() const;

    /// FNV-1a over the structural payload; stable across runs.
    std::uint64_t content_hash() const;

    friend bool operator==(const VoxelGraph&, const VoxelGraph&) = default;
};

struct BuildReport {
    std::size_t n_masked = 0;
    std::size_t n_vertices = 0;
    std::size_t n_edges = 0;
    std::size_t n_isolated = 0;   // masked voxels with no retained edge
    std::size_t n_degenerate = 0; // masked voxels whose ODF mass vanishes over all cones
    std::size_t n_components = 0;
};

/// Indices k of directions falling inside the cone around r_ij:
/// dot(r_k, r_ij/|r_ij|) >= cone_cos_threshold. Throws std::domain_error
/// on a zero r_ij.
std::vector<std::size_t> solid_angle_membership(std::span<const Vec3> directions, Vec3 r_ij,
                                                double cone_cos_threshold);

/// Discrete transition mass p(i, r_ij) = (4*pi/N_o) * sum over the cone
/// membership set of ODF values raised to the sharpening power.
double odf_transition_mass(const ODFField& field, std::uint64_t voxel, IVec3 offset,
                           const GraphBuildConfig& config);

/// Per-voxel maximum transition mass over mask-restricted neighbors,
/// i.e. C_k / 2 in the edge-weight normalization.
struct MaxMassCache {
    std::unordered_map<std::uint64_t, double> max_mass;

    double at(std::uint64_t voxel) const;
};

MaxMassCache compute_max_mass_cache(const Mask& mask, const ODFField& field,
                                    const GraphBuildConfig& config);

/// Normalized edge weight between neighboring voxels i and j, in [0,1].
/// Returns nullopt when either endpoint is degenerate (C == 0); such edges
/// are omitted from the graph.
std::optional<double> edge_weight(const ODFField& field, std::uint64_t i, std::uint64_t j,
                                  const GraphBuildConfig& config, const MaxMassCache& cache);

/// Builds the ODF-weighted voxel graph over the mask. Isolated voxels
/// (no retained incident edge) are removed and counted in the report.
std::pair<VoxelGraph, BuildReport> build_graph(const Mask& mask, const ODFField& field,
                                               const GraphBuildConfig& config);

/// Applies the normalized Laplacian, out = f - D^{-1/2} A D^{-1/2} f,
/// without materializing the operator. Per-row sums run in fixed column
/// order so results do not depend on thread count.
void laplacian_apply(const VoxelGraph& graph, std::span<const double> f, std::span<double> out);
std::vector<double> laplacian_apply(const VoxelGraph& graph, const std::vector<double>& f);

struct ComponentLabeling {
    std::vector<std::uint32_t> labels; // per vertex, component ids 0..n_components-1
    std::size_t n_components = 0;
};

ComponentLabeling connected_components(const VoxelGraph& graph);

/// Assembles a graph from an undirected edge list (for deserialization and
/// synthetic test graphs). Rejects self-loops, duplicate pairs, weights
/// outside (0,1], and zero-degree vertices.
VoxelGraph graph_from_edges(std::size_t n_vertices,
                            std::span<const std::tuple<std::uint64_t, std::uint64_t, double>> edges,
                            std::string kind = "adhoc");

// Graph file: "WMGF-GRF1\n" + JSON header line + '\n' + CSR payload
// (u64 row_ptr, u64 col_idx, f64 weights) + u64 vertex->voxel table.
inline constexpr const char* kGraphMagic = "WMGF-GRF1\n";

void write_graph(const VoxelGraph& graph, const std::filesystem::path& path);
VoxelGraph read_graph(const std::filesystem::path& path);

} // namespace wmgf
