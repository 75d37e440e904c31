#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "wmgf/baseline_filters.hpp"
#include "wmgf/cli.hpp"
#include "wmgf/glm.hpp"
#include "wmgf/graph.hpp"
#include "wmgf/io.hpp"
#include "wmgf/phantom.hpp"
#include "wmgf/spectral.hpp"
#include "wmgf/synthetic.hpp"

#include "test_util.hpp"

using namespace wmgf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int exit_code;
    json stdout_json; // last line of stdout parsed as JSON (when present)
};

CliRun run(const std::vector<std::string>& args) {
    std::stringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    const int code = run_cli(args);
    std::cout.rdbuf(old);

    CliRun result{code, json()};
    std::string line, last;
    while (std::getline(captured, line))
        if (!line.empty()) last = line;
    if (!last.empty()) result.stdout_json = json::parse(last, nullptr, false);
    return result;
}

const fs::path dir = test::temp_dir("cli");

void write_toy_inputs() {
    // 1x1x3 mask with a constant ODF.
    Mask mask;
    mask.dims = {1, 1, 3};
    mask.voxels = {1, 1, 1};
    write_volume(mask.to_volume(), dir / "toy_mask.vol");
    write_odf_field(test::constant_odf_field(mask, 1.0), dir / "toy.odf");
}

} // namespace

TEST_CASE("build-graph reports the toy path case and round-trips") {
    write_toy_inputs();
    const auto result = run({"build-graph", "--mask", (dir / "toy_mask.vol").string(), "--odf",
                             (dir / "toy.odf").string(), "--out", (dir / "toy.grf").string()});
    REQUIRE(result.exit_code == 0);
    CHECK(result.stdout_json["n_vertices"] == 3);
    CHECK(result.stdout_json["n_edges"] == 3);
    CHECK(result.stdout_json["n_components"] == 1);
    CHECK(result.stdout_json["n_isolated"] == 0);
    CHECK(fs::exists(dir / "toy.grf.prov.json"));

    const VoxelGraph graph = read_graph(dir / "toy.grf");
    for (double w : graph.weights) CHECK(w == 1.0);
}

TEST_CASE("build-graph on random inputs matches the in-process build") {
    const Mask mask = test::random_mask({8, 8, 8}, 0.5, 11);
    const ODFField field = test::random_odf_field(mask, 11);
    write_volume(mask.to_volume(), dir / "r_mask.vol");
    write_odf_field(field, dir / "r.odf");

    const auto result = run({"build-graph", "--mask", (dir / "r_mask.vol").string(), "--odf",
                             (dir / "r.odf").string(), "--out", (dir / "r.grf").string()});
    REQUIRE(result.exit_code == 0);

    const auto [expected, report] = build_graph(mask, field, GraphBuildConfig{});
    CHECK(read_graph(dir / "r.grf") == expected);
    CHECK(result.stdout_json["n_vertices"] == report.n_vertices);
    CHECK(result.stdout_json["n_edges"] == report.n_edges);
}

TEST_CASE("missing input files exit with code 2") {
    const auto result = run({"build-graph", "--mask", (dir / "nope.vol").string(), "--odf",
                             (dir / "nope.odf").string(), "--out", (dir / "x.grf").string()});
    CHECK(result.exit_code == 2);
}

TEST_CASE("unknown subcommands and bad flags exit with code 2") {
    CHECK(run({"frobnicate"}).exit_code == 2);
    CHECK(run({"filter", "--no-such-flag"}).exit_code == 2);
}

TEST_CASE("phantom bundles: determinism, rank-1 check, provenance replay") {
    Scene scene;
    {
        SceneConfig config;
        config.size = 12;
        config.streamlines_per_tract = 6;
        config.seed = 3;
        scene = make_crossing_tracts_scene(config);
    }
    write_streamlines(scene.streamlines, dir / "lines.json");
    write_volume(scene.mask.to_volume(scene.voxel_size_mm), dir / "scene_mask.vol");

    const std::vector<std::string> base = {
        "phantom",        "--streamlines", (dir / "lines.json").string(),
        "--grid-like",    (dir / "scene_mask.vol").string(),
        "--seed",         "5",
        "--n-streamlines", "12",
        "--noise-sigma",  "0",
        "--n-frames",     "60",
        "--diffusion-sigma-mm", "4"};

    auto args_a = base;
    args_a.insert(args_a.end(), {"--out-dir", (dir / "ph_a").string()});
    auto args_b = base;
    args_b.insert(args_b.end(), {"--out-dir", (dir / "ph_b").string()});
    REQUIRE(run(args_a).exit_code == 0);
    REQUIRE(run(args_b).exit_code == 0);

    for (const char* name : {"amplitude.vol", "truth.vol", "series.vol", "provenance.json"})
        CHECK(test::read_file_bytes(dir / "ph_a" / name) ==
              test::read_file_bytes(dir / "ph_b" / name));

    // Noise-free bundle is a rank-1 product of pattern and regressor.
    const Volume3D amplitude = read_volume3d(dir / "ph_a/amplitude.vol");
    const Volume4D series = read_volume4d(dir / "ph_a/series.vol");
    BlockParadigm paradigm;
    paradigm.n_frames = 60;
    const auto x = block_regressor(paradigm);
    for (std::size_t v = 0; v < series.n_voxels(); ++v)
        for (std::size_t t = 0; t < series.n_frames; ++t)
            CHECK(series.data[v + series.n_voxels() * t] == amplitude.data[v] * x[t]);

    // Replaying the provenance record reproduces the bundle bit-exactly.
    const auto replay =
        run({"phantom", "--from-provenance", (dir / "ph_a/provenance.json").string(),
             "--out-dir", (dir / "ph_replay").string()});
    REQUIRE(replay.exit_code == 0);
    for (const char* name : {"amplitude.vol", "truth.vol", "series.vol"})
        CHECK(test::read_file_bytes(dir / "ph_a" / name) ==
              test::read_file_bytes(dir / "ph_replay" / name));
}

TEST_CASE("phantom without a seed is a usage error") {
    const auto result = run({"phantom", "--streamlines", (dir / "lines.json").string(),
                             "--grid-like", (dir / "scene_mask.vol").string(), "--out-dir",
                             (dir / "ph_noseed").string()});
    CHECK(result.exit_code == 2);
}

TEST_CASE("filter command") {
    SceneConfig config;
    config.size = 12;
    config.streamlines_per_tract = 4;
    const Scene scene = make_crossing_tracts_scene(config);
    write_volume(scene.mask.to_volume(scene.voxel_size_mm), dir / "f_mask.vol");
    write_odf_field(scene.odf, dir / "f.odf");
    REQUIRE(run({"build-graph", "--mask", (dir / "f_mask.vol").string(), "--odf",
                 (dir / "f.odf").string(), "--out", (dir / "f.grf").string()})
                .exit_code == 0);

    const Volume4D series = test::random_volume4d({12, 12, 12}, 5, 41);
    write_volume(series, dir / "f_series.vol");

    SUBCASE("tau = 0 returns the input byte-identically") {
        const auto result =
            run({"filter", "--series", (dir / "f_series.vol").string(), "--method", "graph",
                 "--graph", (dir / "f.grf").string(), "--tau", "0", "--out",
                 (dir / "f_id.vol").string()});
        REQUIRE(result.exit_code == 0);
        CHECK(read_volume4d(dir / "f_id.vol") == series);
    }
    SUBCASE("graph filtering matches the in-process module path") {
        const auto result =
            run({"filter", "--series", (dir / "f_series.vol").string(), "--method", "graph",
                 "--graph", (dir / "f.grf").string(), "--mask", (dir / "f_mask.vol").string(),
                 "--tau", "1.4", "--out", (dir / "f_graph.vol").string()});
        REQUIRE(result.exit_code == 0);
        const auto [graph, report] = build_graph(scene.mask, scene.odf, GraphBuildConfig{});
        const auto approx = cheb_coefficients(HeatKernel{1.4}, 50);
        const Volume4D expect = filter_timeseries(graph, approx, series, scene.mask);
        CHECK(read_volume4d(dir / "f_graph.vol") == expect);
    }
    SUBCASE("gaussian impulse matches the module oracle") {
        Volume3D impulse = Volume3D::zeros({21, 21, 21});
        impulse.at(10, 10, 10) = 1.0;
        write_volume(impulse, dir / "imp.vol");
        const auto result = run({"filter", "--series", (dir / "imp.vol").string(), "--method",
                                 "gaussian", "--fwhm-mm", "2", "--out",
                                 (dir / "imp_sm.vol").string()});
        REQUIRE(result.exit_code == 0);
        const Volume3D expect = gaussian_filter(impulse, GaussianSpec{2.0, 4.0});
        CHECK(read_volume3d(dir / "imp_sm.vol") == expect);
    }
    SUBCASE("uniform-graph method uses the mask graph") {
        const auto result = run({"filter", "--series", (dir / "f_series.vol").string(),
                                 "--method", "uniform-graph", "--mask",
                                 (dir / "f_mask.vol").string(), "--tau", "2.2", "--out",
                                 (dir / "f_uni.vol").string()});
        REQUIRE(result.exit_code == 0);
        const VoxelGraph uniform = masked_uniform_graph(scene.mask);
        const auto approx = cheb_coefficients(HeatKernel{2.2}, 50);
        const Volume4D expect = filter_timeseries(uniform, approx, series, scene.mask);
        CHECK(read_volume4d(dir / "f_uni.vol") == expect);
    }
    SUBCASE("unknown method is a usage error") {
        const auto result = run({"filter", "--series", (dir / "f_series.vol").string(),
                                 "--method", "median", "--out", (dir / "f_x.vol").string()});
        CHECK(result.exit_code == 2);
    }
    SUBCASE("config file supplies defaults, flags override") {
        std::ofstream os(dir / "filter_cfg.json");
        os << R"({"method": "gaussian", "fwhm_mm": 2.0})";
        os.close();
        const auto result =
            run({"filter", "--config", (dir / "filter_cfg.json").string(), "--series",
                 (dir / "f_series.vol").string(), "--out", (dir / "f_cfg.vol").string()});
        REQUIRE(result.exit_code == 0);
        const Volume4D expect = gaussian_filter(series, GaussianSpec{2.0, 4.0});
        CHECK(read_volume4d(dir / "f_cfg.vol") == expect);

        // Flag wins over the config value.
        const auto result2 =
            run({"filter", "--config", (dir / "filter_cfg.json").string(), "--series",
                 (dir / "f_series.vol").string(), "--fwhm-mm", "4", "--out",
                 (dir / "f_cfg4.vol").string()});
        REQUIRE(result2.exit_code == 0);
        const Volume4D expect4 = gaussian_filter(series, GaussianSpec{4.0, 4.0});
        CHECK(read_volume4d(dir / "f_cfg4.vol") == expect4);
    }
}

TEST_CASE("analyze command") {
    // Noise-free phantom series over a small grid.
    GridSpec grid{{10, 10, 2}, {1.0, 1.0, 1.0}};
    StreamlineSet lines;
    lines.streamlines.push_back({{0.5, 5.5, 0.5}, {9.5, 5.5, 0.5}});
    PhantomSpec spec;
    spec.n_streamlines = 1;
    spec.noise_sigma = 0.0;
    spec.rng_seed = 2;
    spec.diffusion_sigma_mm = 3.0;
    BlockParadigm paradigm;
    paradigm.n_frames = 48;
    paradigm.block_on_frames = 6;
    paradigm.block_off_frames = 6;
    const auto bundle = make_phantom(lines, grid, spec, paradigm);
    write_volume(bundle.series, dir / "an_series.vol");

    SUBCASE("matches the in-process GLM and flags exact fits") {
        const auto result = run({"analyze", "--series", (dir / "an_series.vol").string(),
                                 "--out", (dir / "an_t.vol").string(), "--n-frames", "48",
                                 "--block-on", "6", "--block-off", "6"});
        REQUIRE(result.exit_code == 0);
        CHECK(result.stdout_json["dof"] == 46);

        const auto design = DesignMatrix::from_regressor(unit_regressor(paradigm));
        const TMap expect = t_map(glm_fit(bundle.series, design));
        const Volume3D got = read_volume3d(dir / "an_t.vol");
        CHECK(got == expect.t);

        // Active voxels carry the exact-fit sentinel in a noise-free phantom.
        const Mask truth = bundle.pattern.ground_truth_mask();
        for (std::size_t v = 0; v < truth.voxels.size(); ++v)
            if (truth.voxels[v]) CHECK(std::isinf(got.data[v]));
    }
    SUBCASE("frame-count mismatch is a usage error") {
        const auto result = run({"analyze", "--series", (dir / "an_series.vol").string(),
                                 "--out", (dir / "an_bad.vol").string(), "--n-frames", "60"});
        CHECK(result.exit_code == 2);
    }
}

TEST_CASE("roc command") {
    Mask truth;
    truth.dims = {10, 1, 1};
    truth.voxels = {0, 0, 1, 1, 1, 0, 0, 0, 0, 0};
    Volume3D tmap = Volume3D::zeros({10, 1, 1});
    for (std::size_t v = 0; v < 10; ++v) tmap.data[v] = truth.voxels[v] ? 1.0 : 0.0;
    write_volume(tmap, dir / "roc_t.vol");
    write_volume(truth.to_volume(), dir / "roc_truth.vol");

    SUBCASE("perfect map yields AUC 1") {
        const auto result =
            run({"roc", "--tmap", (dir / "roc_t.vol").string(), "--truth",
                 (dir / "roc_truth.vol").string(), "--out-csv", (dir / "roc.csv").string(),
                 "--out-json", (dir / "roc.json").string(), "--filter-label", "perfect"});
        REQUIRE(result.exit_code == 0);
        CHECK(result.stdout_json["auc"] == 1.0);
        CHECK(result.stdout_json["n_phantoms"] == 1);
        std::ifstream is(dir / "roc.json");
        const json summary = json::parse(is);
        CHECK(summary["auc"] == 1.0);
        CHECK(summary["filter"] == "perfect");
        // CSV has the header and the endpoints.
        std::ifstream csv(dir / "roc.csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header == "fpr,tpr");
    }
    SUBCASE("mismatched list lengths are a usage error") {
        const auto result = run({"roc", "--tmap", (dir / "roc_t.vol").string(), "--tmap",
                                 (dir / "roc_t.vol").string(), "--truth",
                                 (dir / "roc_truth.vol").string(), "--out-csv",
                                 (dir / "roc2.csv").string()});
        CHECK(result.exit_code == 2);
    }
}

TEST_CASE("pipeline command runs end to end and is reproducible") {
    std::ofstream os(dir / "pipe.json");
    os << R"({
      "scene": {"size": 14, "tract_radius_mm": 2.0, "streamlines_per_tract": 8, "seed": 5},
      "phantom": {"n_phantoms": 2, "base_seed": 0, "n_streamlines": 16,
                   "diffusion_sigma_mm": 3.0, "noise_sigma": 1.0},
      "paradigm": {"n_frames": 60, "block_on_frames": 6, "block_off_frames": 6},
      "filters": {"taus": [1.4], "fwhms_mm": [2.0], "include_unfiltered": true},
      "cheb_order": 30,
      "n_thresholds": 100
    })";
    os.close();

    const auto a = run({"pipeline", "--config", (dir / "pipe.json").string(), "--out-dir",
                        (dir / "pipe_a").string(), "--threads", "1"});
    REQUIRE(a.exit_code == 0);
    const auto b = run({"pipeline", "--config", (dir / "pipe.json").string(), "--out-dir",
                        (dir / "pipe_b").string(), "--threads", "3"});
    REQUIRE(b.exit_code == 0);

    for (const auto& entry : fs::directory_iterator(dir / "pipe_a")) {
        const auto name = entry.path().filename();
        CAPTURE(name.string());
        CHECK(test::read_file_bytes(entry.path()) == test::read_file_bytes(dir / "pipe_b" / name));
    }
    CHECK(a.stdout_json["methods"].size() == 3);

    // Flag overrides replace the config grids and land in the provenance echo.
    const auto c = run({"pipeline", "--config", (dir / "pipe.json").string(), "--out-dir",
                        (dir / "pipe_c").string(), "--tau", "2.2", "--tau", "3.3", "--fwhm-mm",
                        "4", "--seed", "9"});
    REQUIRE(c.exit_code == 0);
    CHECK(c.stdout_json["methods"].size() == 4); // 2 taus + 1 fwhm + unfiltered
    std::ifstream prov(dir / "pipe_c/pipeline.prov.json");
    const json effective = json::parse(prov);
    CHECK(effective["config"]["filters"]["taus"] == json::array({2.2, 3.3}));
    CHECK(effective["config"]["filters"]["fwhms_mm"] == json::array({4.0}));
    CHECK(effective["config"]["phantom"]["base_seed"] == 9);
}
