#include "wmgf/graph.hpp"

#include "json.hpp"

#include "binary_io.hpp"

namespace wmgf {

namespace {
using nlohmann::json;
using namespace wmgf::detail;
} // namespace

void write_graph(const VoxelGraph& graph, const std::filesystem::path& path) {
    graph.validate();
    auto os = open_out(path);
    os << kGraphMagic;
    json header;
    header["n_vertices"] = graph.n_vertices();
    header["n_edges"] = graph.n_edges();
    header["dims"] = {graph.dims[0], graph.dims[1], graph.dims[2]};
    header["config"] = {{"kind", graph.kind},
                        {"sharpening_power", graph.config.sharpening_power},
                        {"cone_cos_threshold", graph.config.cone_cos_threshold},
                        {"min_weight_epsilon", graph.config.min_weight_epsilon}};
    os << header.dump() << '\n';
    write_u64_le(os, graph.row_ptr.data(), graph.row_ptr.size());
    write_u64_le(os, graph.col_idx.data(), graph.col_idx.size());
    write_f64_le(os, graph.weights.data(), graph.weights.size());
    write_u64_le(os, graph.vertex_to_voxel.data(), graph.vertex_to_voxel.size());
    if (!os) throw io_error("write failed: " + path.string());
}

VoxelGraph read_graph(const std::filesystem::path& path) {
    auto is = open_in(path);
    expect_magic(is, kGraphMagic, path);
    std::string line;
    if (!std::getline(is, line)) throw format_error("missing header line in " + path.string());
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object())
        throw format_error("graph header is not a JSON object in " + path.string());

    for (const char* field : {"n_vertices", "n_edges"})
        if (!header.contains(field) || !header[field].is_number_unsigned())
            throw format_error(std::string("graph header: '") + field +
                               "' must be an unsigned integer");
    if (!header.contains("dims") || !header["dims"].is_array() || header["dims"].size() != 3)
        throw format_error("graph header: 'dims' must be an array of 3 integers");
    if (!header.contains("config") || !header["config"].is_object())
        throw format_error("graph header: 'config' must be an object");

    VoxelGraph graph;
    const auto n = header["n_vertices"].get<std::size_t>();
    const auto n_edges = header["n_edges"].get<std::size_t>();
    for (int i = 0; i < 3; ++i) {
        if (!header["dims"][i].is_number_unsigned())
            throw format_error("graph header: 'dims' entries must be unsigned integers");
        graph.dims[i] = header["dims"][i].get<std::size_t>();
    }
    const auto& cfg = header["config"];
    if (!cfg.contains("kind") || !cfg["kind"].is_string())
        throw format_error("graph header: config 'kind' must be a string");
    graph.kind = cfg["kind"].get<std::string>();
    if (cfg.contains("sharpening_power"))
        graph.config.sharpening_power = cfg["sharpening_power"].get<unsigned>();
    if (cfg.contains("cone_cos_threshold"))
        graph.config.cone_cos_threshold = cfg["cone_cos_threshold"].get<double>();
    if (cfg.contains("min_weight_epsilon"))
        graph.config.min_weight_epsilon = cfg["min_weight_epsilon"].get<double>();

    graph.row_ptr.resize(n + 1);
    graph.col_idx.resize(2 * n_edges);
    graph.weights.resize(2 * n_edges);
    graph.vertex_to_voxel.resize(n);
    if (read_u64_le(is, graph.row_ptr.data(), graph.row_ptr.size()) != graph.row_ptr.size() ||
        read_u64_le(is, graph.col_idx.data(), graph.col_idx.size()) != graph.col_idx.size() ||
        read_f64_le(is, graph.weights.data(), graph.weights.size()) != graph.weights.size() ||
        read_u64_le(is, graph.vertex_to_voxel.data(), n) != n)
        throw size_mismatch_error("graph payload truncated in " + path.string());
    check_no_trailing(is, path);

    for (std::size_t i = 0; i < n; ++i)
        if (graph.row_ptr[i] > graph.row_ptr[i + 1])
            throw format_error("graph payload: row pointers not monotone in " + path.string());
    if (graph.row_ptr.front() != 0 || graph.row_ptr.back() != graph.col_idx.size())
        throw format_error("graph payload: row pointers disagree with edge count in " +
                           path.string());

    // Degrees are derived, not stored; the fixed column order keeps the
    // recomputed sums identical to the builder's.
    graph.degrees.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::uint64_t k = graph.row_ptr[i]; k < graph.row_ptr[i + 1]; ++k) {
            if (graph.col_idx[k] >= n)
                throw format_error("graph payload: column index out of range in " + path.string());
            sum += graph.weights[k];
        }
        graph.degrees[i] = sum;
    }
    graph.validate();
    return graph;
}

} // namespace wmgf
