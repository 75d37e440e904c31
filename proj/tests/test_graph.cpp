#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <numeric>

#include "wmgf/baseline_filters.hpp"
#include "wmgf/graph.hpp"
#include "wmgf/spectral.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

using namespace wmgf;

namespace {

constexpr double kFourPi = 4.0 * 3.14159265358979323846;

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

} // namespace

TEST_CASE("5x5x5 neighborhood has 124 offsets and 98 direction classes") {
    const auto& spec = NeighborhoodSpec::instance();
    CHECK(spec.offsets().size() == 124);
    CHECK(spec.unique_directions().size() == 98);

    // Every offset maps to exactly one class, and the class direction is
    // parallel to the offset.
    for (const IVec3& d : spec.offsets()) {
        const std::size_t cls = spec.direction_class(d);
        REQUIRE(cls < 98);
        const Vec3 a = normalized(to_vec3(d));
        const Vec3 b = normalized(to_vec3(spec.unique_directions()[cls]));
        CHECK(dot(a, b) == doctest::Approx(1.0).epsilon(1e-12));
        // Opposite offsets land in the opposite class.
        CHECK(spec.opposite_class(cls) == spec.direction_class(-d));
    }
    CHECK_THROWS_AS(spec.direction_class({0, 0, 0}), std::domain_error);
    CHECK_THROWS_AS(spec.direction_class({3, 0, 0}), std::domain_error);
}

TEST_CASE("cone threshold matches the 4*pi/98 solid angle") {
    CHECK(kConeCos98 == doctest::Approx(0.9795918367346939).epsilon(1e-15));
}

TEST_CASE("solid angle membership") {
    SUBCASE("direction equal to the axis is a member") {
        const std::vector<Vec3> dirs = {{1.0, 0.0, 0.0}};
        const auto members = solid_angle_membership(dirs, {2.0, 0.0, 0.0}, kConeCos98);
        CHECK(members == std::vector<std::size_t>{0});
    }
    SUBCASE("orthogonal direction is excluded") {
        const std::vector<Vec3> dirs = {{0.0, 1.0, 0.0}};
        CHECK(solid_angle_membership(dirs, {1.0, 0.0, 0.0}, kConeCos98).empty());
    }
    SUBCASE("zero offset is a domain error") {
        const std::vector<Vec3> dirs = {{1.0, 0.0, 0.0}};
        CHECK_THROWS_AS(solid_angle_membership(dirs, {0.0, 0.0, 0.0}, kConeCos98),
                        std::domain_error);
    }
    SUBCASE("98-point Fibonacci sphere agrees with an exhaustive scan") {
        const auto dirs = fibonacci_sphere(98);
        const Vec3 axis = {1.0, 0.0, 0.0};
        const auto members = solid_angle_membership(dirs, axis, kConeCos98);
        std::vector<std::size_t> expected;
        for (std::size_t k = 0; k < dirs.size(); ++k)
            if (dirs[k].x >= kConeCos98) expected.push_back(k);
        CHECK(members == expected);
    }
}

TEST_CASE("transition mass follows the discrete sum") {
    Mask mask = test::random_mask({3, 3, 3}, 1.0, 1);
    const GraphBuildConfig config;

    SUBCASE("constant ODF gives (4pi/N)*m*c^n") {
        const double c = 0.5;
        const ODFField field = test::constant_odf_field(mask, c);
        const IVec3 offset{1, 0, 0};
        const auto members = solid_angle_membership(field.directions(), to_vec3(offset),
                                                    config.cone_cos_threshold);
        const double expected = kFourPi / 98.0 * static_cast<double>(members.size()) * c * c;
        CHECK(odf_transition_mass(field, 13, offset, config) ==
              doctest::Approx(expected).epsilon(1e-15));
        // The canonical direction set puts exactly one direction per cone.
        CHECK(members.size() == 1);
    }
    SUBCASE("all-zero ODF gives zero") {
        const ODFField field = test::constant_odf_field(mask, 0.0);
        CHECK(odf_transition_mass(field, 13, {1, 1, 0}, config) == 0.0);
    }
    SUBCASE("random ODF matches the scalar recomputation oracle") {
        const ODFField field = test::random_odf_field(mask, 3);
        const auto& spec = NeighborhoodSpec::instance();
        for (const IVec3& offset : spec.offsets()) {
            const double got = odf_transition_mass(field, 13, offset, config);
            const double want =
                test::oracle_mass(field, 13, offset, config.sharpening_power,
                            config.cone_cos_threshold);
            CHECK(got == want);
        }
    }
    SUBCASE("voxel outside the field is a lookup error") {
        Mask small = test::random_mask({3, 3, 3}, 1.0, 1);
        small.voxels[13] = 0;
        const ODFField field = test::random_odf_field(small, 3);
        CHECK_THROWS_AS(odf_transition_mass(field, 13, {1, 0, 0}, config), std::out_of_range);
    }
    SUBCASE("invalid offsets are domain errors") {
        const ODFField field = test::constant_odf_field(mask, 1.0);
        CHECK_THROWS_AS(odf_transition_mass(field, 13, {0, 0, 0}, config), std::domain_error);
        CHECK_THROWS_AS(odf_transition_mass(field, 13, {3, 0, 0}, config), std::domain_error);
    }
}

TEST_CASE("edge weights") {
    const GraphBuildConfig config;

    SUBCASE("constant isotropic ODF forces w = 1 exactly") {
        const Mask mask = test::random_mask({4, 4, 4}, 1.0, 2);
        const ODFField field = test::constant_odf_field(mask, 0.7);
        const auto cache = compute_max_mass_cache(mask, field, config);
        CHECK(edge_weight(field, 0, 1, config, cache) == 1.0);
        CHECK(edge_weight(field, 21, 42, config, cache) == 1.0); // offset (1,1,1)
    }
    SUBCASE("degenerate voxel omits the edge") {
        Mask mask;
        mask.dims = {2, 1, 1};
        mask.voxels = {1, 1};
        const auto dirs = neighborhood_direction_set();
        std::vector<double> values(2 * dirs.size(), 1.0);
        for (std::size_t k = 0; k < dirs.size(); ++k) values[dirs.size() + k] = 0.0;
        const ODFField field({2, 1, 1}, dirs, {0, 1}, values);
        const auto cache = compute_max_mass_cache(mask, field, config);
        CHECK(edge_weight(field, 0, 1, config, cache) == std::nullopt);
    }
    SUBCASE("sharp-lobe line matches the hand computation") {
        // Three voxels along x, every ODF a sharp lobe toward +x (value 1
        // on the (1,0,0) class, 0.01 elsewhere), n = 2. The middle voxel
        // sees neighbors on both sides, so its normalizer comes from the
        // forward lobe while the backward mass stays tiny.
        Mask mask;
        mask.dims = {3, 1, 1};
        mask.voxels = {1, 1, 1};
        const auto dirs = neighborhood_direction_set();
        const auto& spec = NeighborhoodSpec::instance();
        const std::size_t cls_px = spec.direction_class({1, 0, 0});
        std::vector<double> values(3 * dirs.size(), 0.01);
        for (int v = 0; v < 3; ++v) values[v * dirs.size() + cls_px] = 1.0;
        const ODFField field({3, 1, 1}, dirs, {0, 1, 2}, values);
        const auto cache = compute_max_mass_cache(mask, field, config);

        // Hand evaluation of the (0,1) edge weight. Each cone holds one
        // direction of the canonical set, so p(0,+x) = (4pi/98)*1^2 and
        // p(1,-x) = (4pi/98)*0.01^2. Voxel 0's max over {+x at distance 1,
        // +x at distance 2} is p(0,+x); voxel 1's max over {-x,+x} is its
        // forward lobe p(1,+x) = p(0,+x).
        const double p_fwd = kFourPi / 98.0 * 1.0;
        const double p_back = kFourPi / 98.0 * 0.01 * 0.01;
        const double expected = p_fwd / (2.0 * p_fwd) + p_back / (2.0 * p_fwd);
        const auto got = edge_weight(field, 0, 1, config, cache);
        REQUIRE(got.has_value());
        CHECK(*got == doctest::Approx(expected).epsilon(1e-15));
        CHECK(*got == doctest::Approx(0.5 + 0.00005).epsilon(1e-12));
        CHECK((0.0 <= *got && *got <= 1.0));
    }
    SUBCASE("weights are symmetric in the argument order") {
        const Mask mask = test::random_mask({4, 4, 4}, 0.9, 5);
        const ODFField field = test::random_odf_field(mask, 6);
        const auto cache = compute_max_mass_cache(mask, field, config);
        const auto selected = mask.selected();
        for (std::size_t a = 0; a + 1 < selected.size(); a += 7) {
            const auto i = selected[a], j = selected[a + 1];
            const auto ci = grid_coords(mask.dims, i);
            const auto cj = grid_coords(mask.dims, j);
            if (std::abs(long(ci[0]) - long(cj[0])) > 2 ||
                std::abs(long(ci[1]) - long(cj[1])) > 2 ||
                std::abs(long(ci[2]) - long(cj[2])) > 2)
                continue;
            CHECK(edge_weight(field, i, j, config, cache) ==
                  edge_weight(field, j, i, config, cache));
        }
    }
    SUBCASE("non-neighbor pair is a domain error") {
        const Mask mask = test::random_mask({8, 1, 1}, 1.0, 2);
        const ODFField field = test::constant_odf_field(mask, 1.0);
        const auto cache = compute_max_mass_cache(mask, field, config);
        CHECK_THROWS_AS(edge_weight(field, 0, 5, config, cache), std::domain_error);
        CHECK_THROWS_AS(edge_weight(field, 3, 3, config, cache), std::domain_error);
    }
}

TEST_CASE("build_graph") {
    const GraphBuildConfig config;

    SUBCASE("1x1x3 constant-ODF mask gives the unit-weight path") {
        Mask mask;
        mask.dims = {1, 1, 3};
        mask.voxels = {1, 1, 1};
        const ODFField field = test::constant_odf_field(mask, 1.0);
        const auto [graph, report] = build_graph(mask, field, config);
        graph.validate();
        CHECK(graph.n_vertices() == 3);
        CHECK(graph.n_edges() == 3); // 0-1, 1-2 and the distance-2 edge 0-2
        CHECK(report.n_isolated == 0);
        CHECK(report.n_components == 1);
        CHECK(graph.row_ptr[1] - graph.row_ptr[0] == 2);
        CHECK(graph.row_ptr[2] - graph.row_ptr[1] == 2);
        for (double w : graph.weights) CHECK(w == 1.0);
    }
    SUBCASE("immediate-neighbor path when distance-2 offsets fall outside") {
        Mask mask;
        mask.dims = {1, 1, 5};
        mask.voxels = {1, 0, 1, 0, 1}; // spaced by 2: only (0,0,2) offsets connect
        const ODFField field = test::constant_odf_field(mask, 1.0);
        const auto [graph, report] = build_graph(mask, field, config);
        CHECK(graph.n_vertices() == 3);
        CHECK(graph.n_edges() == 2);
        CHECK(report.n_components == 1);
    }
    SUBCASE("single voxel is isolated and removed") {
        Mask mask;
        mask.dims = {5, 5, 5};
        mask.voxels.assign(125, 0);
        mask.voxels[62] = 1;
        const ODFField field = test::constant_odf_field(mask, 1.0);
        const auto [graph, report] = build_graph(mask, field, config);
        CHECK(graph.n_vertices() == 0);
        CHECK(report.n_isolated == 1);
        CHECK(report.n_masked == 1);
        CHECK(report.n_components == 0);
    }
    SUBCASE("empty mask is a domain error") {
        Mask mask;
        mask.dims = {2, 2, 2};
        mask.voxels.assign(8, 0);
        const Mask full = test::random_mask({2, 2, 2}, 1.0, 1);
        const ODFField field = test::constant_odf_field(full, 1.0);
        CHECK_THROWS_AS(build_graph(mask, field, config), std::domain_error);
    }
    SUBCASE("mask/field dimension mismatch is a shape error") {
        const Mask mask = test::random_mask({3, 3, 3}, 1.0, 1);
        const Mask other = test::random_mask({4, 3, 3}, 1.0, 1);
        const ODFField field = test::constant_odf_field(other, 1.0);
        CHECK_THROWS_AS(build_graph(mask, field, config), shape_error);
    }
    SUBCASE("8x8x8 random instance equals the O(N^2) brute-force oracle exactly") {
        const Mask mask = test::random_mask({8, 8, 8}, 0.55, 11);
        const ODFField field = test::random_odf_field(mask, 11);
        const auto [graph, report] = build_graph(mask, field, config);
        graph.validate();

        const auto oracle = test::oracle_dense_weights(mask, field, config);
        std::size_t listed = 0;
        for (std::size_t i = 0; i < graph.n_vertices(); ++i) {
            for (std::uint64_t k = graph.row_ptr[i]; k < graph.row_ptr[i + 1]; ++k) {
                const std::size_t j = graph.col_idx[k];
                if (j < i) continue; // count each undirected edge once
                ++listed;
                const auto key = std::make_pair(graph.vertex_to_voxel[i],
                                                graph.vertex_to_voxel[j]);
                const auto it = oracle.find(key);
                REQUIRE(it != oracle.end());
                CHECK(graph.weights[k] == it->second); // bit-exact
            }
        }
        CHECK(listed == oracle.size());
        CHECK(report.n_vertices + report.n_isolated == report.n_masked);
    }
}

TEST_CASE("laplacian_apply") {
    SUBCASE("annihilates D^{1/2} * 1") {
        const VoxelGraph graph = test::random_connected_graph(120, 3);
        std::vector<double> f(graph.n_vertices());
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sqrt(graph.degrees[i]);
        const auto out = laplacian_apply(graph, f);
        double norm_out = 0.0, norm_f = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            norm_out += out[i] * out[i];
            norm_f += f[i] * f[i];
        }
        CHECK(std::sqrt(norm_out) <= 1e-10 * std::sqrt(norm_f));
    }
    SUBCASE("two-vertex graph by hand") {
        const std::vector<std::tuple<std::uint64_t, std::uint64_t, double>> edges = {{0, 1, 1.0}};
        const VoxelGraph graph = graph_from_edges(2, edges);
        const auto out = laplacian_apply(graph, std::vector<double>{1.0, 0.0});
        CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(out[1] == doctest::Approx(-1.0).epsilon(1e-15));
    }
    SUBCASE("matches the dense matrix-vector oracle on 200 vertices") {
        const VoxelGraph graph = test::random_connected_graph(200, 8);
        const auto f = test::random_signal(200, 81);
        const auto got = laplacian_apply(graph, f);

        const auto lap = dense_laplacian(graph);
        std::vector<double> want(200, 0.0);
        for (std::size_t i = 0; i < 200; ++i)
            for (std::size_t j = 0; j < 200; ++j) want[i] += lap[i * 200 + j] * f[j];
        CHECK(test::rel_l2_error(got, want) <= 1e-12);
    }
    SUBCASE("length mismatch is a shape error") {
        const VoxelGraph graph = test::random_connected_graph(10, 1);
        std::vector<double> f(9, 0.0), out(10);
        CHECK_THROWS_AS(laplacian_apply(graph, f, out), shape_error);
    }
}

TEST_CASE("connected_components") {
    SUBCASE("path graph is one component") {
        std::vector<std::tuple<std::uint64_t, std::uint64_t, double>> edges;
        for (std::uint64_t v = 1; v < 10; ++v) edges.push_back({v - 1, v, 1.0});
        const auto labels = connected_components(graph_from_edges(10, edges));
        CHECK(labels.n_components == 1);
    }
    SUBCASE("two distant voxel clusters form two components") {
        Mask mask;
        mask.dims = {9, 1, 1};
        mask.voxels = {1, 1, 0, 0, 0, 0, 0, 1, 1}; // gap of 5 > neighborhood reach
        const ODFField field = test::constant_odf_field(mask, 1.0);
        const auto [graph, report] = build_graph(mask, field, GraphBuildConfig{});
        CHECK(report.n_components == 2);
    }
    SUBCASE("random built graph matches a union-find oracle") {
        const Mask mask = test::random_mask({7, 7, 7}, 0.4, 5);
        const ODFField field = test::random_odf_field(mask, 5);
        const auto [graph, report] = build_graph(mask, field, GraphBuildConfig{});
        const auto labels = connected_components(graph);

        UnionFind uf(graph.n_vertices());
        for (std::size_t i = 0; i < graph.n_vertices(); ++i)
            for (std::uint64_t k = graph.row_ptr[i]; k < graph.row_ptr[i + 1]; ++k)
                uf.unite(i, graph.col_idx[k]);
        std::set<std::size_t> roots;
        for (std::size_t i = 0; i < graph.n_vertices(); ++i) roots.insert(uf.find(i));
        CHECK(labels.n_components == roots.size());
        for (std::size_t i = 0; i < graph.n_vertices(); ++i)
            for (std::size_t j = 0; j < graph.n_vertices(); ++j)
                if (uf.find(i) == uf.find(j))
                    CHECK(labels.labels[i] == labels.labels[j]);
    }
}

TEST_CASE("built graphs satisfy the structural invariants") {
    for (std::uint64_t seed : {21, 22, 23}) {
        const Mask mask = test::random_mask({6, 6, 6}, 0.5, seed);
        const ODFField field = test::random_odf_field(mask, seed + 100);
        const auto [graph, report] = build_graph(mask, field, GraphBuildConfig{});
        graph.validate(); // weights in (0,1], exact symmetry, degrees

        for (std::size_t i = 0; i < graph.n_vertices(); ++i)
            CHECK(graph.row_ptr[i + 1] - graph.row_ptr[i] <= 124);

        // Spectrum bound on small graphs.
        if (graph.n_vertices() > 0 && graph.n_vertices() <= 500) {
            const auto eigs = laplacian_eigenvalues(graph);
            CHECK(eigs.front() >= -1e-9);
            CHECK(eigs.back() <= 2.0 + 1e-9);
        }
    }
}

TEST_CASE("uniform-ODF limit matches the masked uniform graph") {
    const Mask mask = test::random_mask({6, 5, 4}, 0.7, 31);
    const ODFField field = test::constant_odf_field(mask, 0.33);
    const auto [graph, report] = build_graph(mask, field, GraphBuildConfig{});
    const VoxelGraph uniform = masked_uniform_graph(mask);

    CHECK(graph.vertex_to_voxel == uniform.vertex_to_voxel);
    CHECK(graph.row_ptr == uniform.row_ptr);
    CHECK(graph.col_idx == uniform.col_idx);
    REQUIRE(graph.weights.size() == uniform.weights.size());
    for (std::size_t k = 0; k < graph.weights.size(); ++k) {
        CHECK(graph.weights[k] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(uniform.weights[k] == 1.0);
    }
}

TEST_CASE("graph serialization round-trips byte-exactly") {
    const Mask mask = test::random_mask({5, 5, 5}, 0.6, 17);
    const ODFField field = test::random_odf_field(mask, 18);
    const auto [graph, report] = build_graph(mask, field, GraphBuildConfig{});

    const auto dir = test::temp_dir("graph_io");
    write_graph(graph, dir / "g1.grf");
    write_graph(graph, dir / "g2.grf");
    CHECK(test::read_file_bytes(dir / "g1.grf") == test::read_file_bytes(dir / "g2.grf"));

    const VoxelGraph back = read_graph(dir / "g1.grf");
    CHECK(back == graph);
    CHECK(back.content_hash() == graph.content_hash());

    // Truncated payload is a size mismatch.
    auto bytes = test::read_file_bytes(dir / "g1.grf");
    bytes.resize(bytes.size() - 4);
    std::ofstream os(dir / "trunc.grf", std::ios::binary | std::ios::trunc);
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    os.close();
    CHECK_THROWS_AS(read_graph(dir / "trunc.grf"), size_mismatch_error);
}

TEST_CASE("graph_from_edges validates its input") {
    using E = std::tuple<std::uint64_t, std::uint64_t, double>;
    CHECK_THROWS_AS(graph_from_edges(2, std::vector<E>{{0, 0, 0.5}}), shape_error);
    CHECK_THROWS_AS(graph_from_edges(2, std::vector<E>{{0, 1, 1.5}}), shape_error);
    CHECK_THROWS_AS(graph_from_edges(2, std::vector<E>{{0, 1, 0.5}, {1, 0, 0.5}}), shape_error);
    CHECK_THROWS_AS(graph_from_edges(3, std::vector<E>{{0, 1, 0.5}}), shape_error);
}
