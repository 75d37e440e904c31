#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "wmgf/baseline_filters.hpp"

#include "test_util.hpp"

using namespace wmgf;

namespace {

/// Direct dense 3D convolution with the separable product kernel, interior
/// use only (no boundary handling).
Volume3D oracle_dense_convolution(const Volume3D& vol, double fwhm_mm, double truncation) {
    const double sigma = fwhm_mm * kFwhmToSigma; // 1 mm voxels assumed
    const long radius = std::max(1L, static_cast<long>(std::ceil(truncation * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (long t = -radius; t <= radius; ++t) {
        k[static_cast<std::size_t>(t + radius)] =
            std::exp(-static_cast<double>(t * t) / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(t + radius)];
    }
    for (double& w : k) w /= sum;

    Volume3D out = Volume3D::zeros(vol.dims, vol.voxel_size_mm);
    const long nx = static_cast<long>(vol.dims[0]);
    const long ny = static_cast<long>(vol.dims[1]);
    const long nz = static_cast<long>(vol.dims[2]);
    for (long z = 0; z < nz; ++z)
        for (long y = 0; y < ny; ++y)
            for (long x = 0; x < nx; ++x) {
                double acc = 0.0;
                for (long c = -radius; c <= radius; ++c)
                    for (long b = -radius; b <= radius; ++b)
                        for (long a = -radius; a <= radius; ++a) {
                            const long xx = x + a, yy = y + b, zz = z + c;
                            if (xx < 0 || yy < 0 || zz < 0 || xx >= nx || yy >= ny || zz >= nz)
                                continue;
                            const double w = k[static_cast<std::size_t>(a + radius)] *
                                             k[static_cast<std::size_t>(b + radius)] *
                                             k[static_cast<std::size_t>(c + radius)];
                            acc += w * vol.at(static_cast<std::size_t>(xx),
                                              static_cast<std::size_t>(yy),
                                              static_cast<std::size_t>(zz));
                        }
                out.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                       static_cast<std::size_t>(z)) = acc;
            }
    return out;
}

} // namespace

TEST_CASE("gaussian_filter") {
    SUBCASE("vanishing width is the identity") {
        const Volume3D vol = test::random_volume({6, 5, 4}, 3);
        const Volume3D out = gaussian_filter(vol, GaussianSpec{1e-7, 4.0});
        CHECK(out == vol);
    }
    SUBCASE("constant volumes stay constant, boundary included") {
        Volume3D vol = Volume3D::zeros({9, 9, 9});
        for (double& v : vol.data) v = 3.25;
        const Volume3D out = gaussian_filter(vol, GaussianSpec{4.0, 4.0});
        for (double v : out.data) CHECK(v == doctest::Approx(3.25).epsilon(1e-13));
    }
    SUBCASE("center impulse matches the dense convolution oracle") {
        Volume3D vol = Volume3D::zeros({21, 21, 21});
        vol.at(10, 10, 10) = 1.0;
        const Volume3D got = gaussian_filter(vol, GaussianSpec{2.0, 4.0});
        const Volume3D want = oracle_dense_convolution(vol, 2.0, 4.0);
        for (std::size_t i = 0; i < got.data.size(); ++i)
            CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-10));
    }
    SUBCASE("impulse response is symmetric under axis permutations") {
        Volume3D vol = Volume3D::zeros({11, 11, 11});
        vol.at(5, 5, 5) = 1.0;
        const Volume3D out = gaussian_filter(vol, GaussianSpec{3.0, 4.0});
        for (std::size_t z = 0; z < 11; ++z)
            for (std::size_t y = 0; y < 11; ++y)
                for (std::size_t x = 0; x < 11; ++x) {
                    // Pass-order rounding allows last-ulp differences.
                    CHECK(out.at(x, y, z) ==
                          doctest::Approx(out.at(y, x, z)).epsilon(1e-13));
                    CHECK(out.at(x, y, z) ==
                          doctest::Approx(out.at(z, y, x)).epsilon(1e-13));
                }
    }
    SUBCASE("anisotropic voxels scale the kernel per axis") {
        Volume3D vol = Volume3D::zeros({15, 15, 15}, {1.0, 2.0, 1.0});
        vol.at(7, 7, 7) = 1.0;
        const Volume3D out = gaussian_filter(vol, GaussianSpec{4.0, 4.0});
        // Wider voxels along y mean a narrower kernel in voxel units.
        CHECK(out.at(7, 8, 7) < out.at(8, 7, 7));
    }
    SUBCASE("frames of a 4D series are filtered independently") {
        const Volume4D series = test::random_volume4d({8, 8, 8}, 4, 5);
        const Volume4D out = gaussian_filter(series, GaussianSpec{2.0, 4.0}, 3);
        for (std::size_t t = 0; t < series.n_frames; ++t) {
            Volume3D frame = Volume3D::zeros(series.dims, series.voxel_size_mm);
            std::copy_n(series.frame(t), series.n_voxels(), frame.data.begin());
            const Volume3D expect = gaussian_filter(frame, GaussianSpec{2.0, 4.0});
            for (std::size_t v = 0; v < series.n_voxels(); ++v)
                CHECK(out.frame(t)[v] == expect.data[v]);
        }
    }
    SUBCASE("non-positive FWHM is a domain error") {
        const Volume3D vol = test::random_volume({4, 4, 4}, 1);
        CHECK_THROWS_AS(gaussian_filter(vol, GaussianSpec{0.0, 4.0}), std::domain_error);
        CHECK_THROWS_AS(gaussian_filter(vol, GaussianSpec{-1.0, 4.0}), std::domain_error);
    }
}

TEST_CASE("masked_uniform_graph") {
    SUBCASE("1x1x3 mask gives the unit path with the distance-2 chord") {
        Mask mask;
        mask.dims = {1, 1, 3};
        mask.voxels = {1, 1, 1};
        const VoxelGraph graph = masked_uniform_graph(mask);
        graph.validate();
        CHECK(graph.n_vertices() == 3);
        CHECK(graph.n_edges() == 3);
        for (double w : graph.weights) CHECK(w == 1.0);
        CHECK(graph.kind == "uniform");
    }
    SUBCASE("single-voxel mask leaves no vertices") {
        Mask mask;
        mask.dims = {7, 7, 7};
        mask.voxels.assign(343, 0);
        mask.voxels[171] = 1;
        const VoxelGraph graph = masked_uniform_graph(mask);
        CHECK(graph.n_vertices() == 0);
    }
    SUBCASE("empty mask is a domain error") {
        Mask mask;
        mask.dims = {2, 2, 2};
        mask.voxels.assign(8, 0);
        CHECK_THROWS_AS(masked_uniform_graph(mask), std::domain_error);
    }
    SUBCASE("random mask matches a brute-force neighborhood scan") {
        const Mask mask = test::random_mask({6, 6, 6}, 0.5, 13);
        const VoxelGraph graph = masked_uniform_graph(mask);
        graph.validate();

        // Oracle: all masked pairs within the 5x5x5 box, minus isolated voxels.
        const auto selected = mask.selected();
        std::set<std::pair<std::uint64_t, std::uint64_t>> expected;
        std::set<std::uint64_t> connected;
        for (std::size_t a = 0; a < selected.size(); ++a)
            for (std::size_t b = a + 1; b < selected.size(); ++b) {
                const auto ca = grid_coords(mask.dims, selected[a]);
                const auto cb = grid_coords(mask.dims, selected[b]);
                if (std::abs(long(ca[0]) - long(cb[0])) > 2 ||
                    std::abs(long(ca[1]) - long(cb[1])) > 2 ||
                    std::abs(long(ca[2]) - long(cb[2])) > 2)
                    continue;
                expected.insert({selected[a], selected[b]});
                connected.insert(selected[a]);
                connected.insert(selected[b]);
            }
        CHECK(graph.n_edges() == expected.size());
        CHECK(graph.n_vertices() == connected.size());
        for (std::size_t i = 0; i < graph.n_vertices(); ++i)
            for (std::uint64_t k = graph.row_ptr[i]; k < graph.row_ptr[i + 1]; ++k) {
                const std::size_t j = graph.col_idx[k];
                if (j < i) continue;
                CHECK(expected.contains(
                    {graph.vertex_to_voxel[i], graph.vertex_to_voxel[j]}));
            }
    }
}
