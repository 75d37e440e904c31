#include "wmgf/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "wmgf/baseline_filters.hpp"
#include "wmgf/experiment.hpp"
#include "wmgf/io.hpp"
#include "wmgf/synthetic.hpp"

namespace wmgf {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

/// Input/usage problems map to exit code 2; anything thrown past them is a
/// computational failure (exit code 1).
class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

void require_file(const fs::path& path, const char* what) {
    if (!fs::exists(path))
        throw usage_error(std::string(what) + " not found: " + path.string());
}

unsigned parse_threads(const std::string& text) {
    if (text == "auto") return 0;
    unsigned n = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), n);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw usage_error("--threads expects a positive integer or 'auto'");
    if (n == 0) throw usage_error("--threads expects a positive integer or 'auto'");
    return n;
}

json load_config_file(const std::string& path) {
    require_file(path, "config file");
    std::ifstream is(path, std::ios::binary);
    json config = json::parse(is, nullptr, false);
    if (config.is_discarded() || !config.is_object())
        throw usage_error("config file is not a JSON object: " + path);
    return config;
}

/// Picks up `--config <file>` ahead of CLI11 so file values can seed the
/// defaults; command-line flags then override them.
json peek_config(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") return load_config_file(args[i + 1]);
    return json::object();
}

template <typename T>
void cfg(const json& j, const char* key, T& field) {
    if (!j.contains(key)) return;
    try {
        field = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw usage_error(std::string("config key '") + key + "' has the wrong type");
    }
}

void write_provenance(const fs::path& out_path, const std::string& command, json config) {
    json prov;
    prov["command"] = command;
    prov["config"] = std::move(config);
    std::ofstream os(out_path.string() + ".prov.json", std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot write provenance for " + out_path.string());
    os << prov.dump(2) << '\n';
}

Mask load_mask(const fs::path& path) {
    require_file(path, "mask volume");
    const Mask mask = Mask::from_volume(read_volume3d(path));
    mask.validate();
    return mask;
}

json report_to_json(const BuildReport& report) {
    return {{"n_masked", report.n_masked},         {"n_vertices", report.n_vertices},
            {"n_edges", report.n_edges},           {"n_isolated", report.n_isolated},
            {"n_degenerate", report.n_degenerate}, {"n_components", report.n_components}};
}

// ---------------------------------------------------------------------------
// synth-scene
// ---------------------------------------------------------------------------

struct SynthSceneArgs {
    SceneConfig scene;
    std::string out_dir;
};

void run_synth_scene(const SynthSceneArgs& args) {
    const Scene scene = make_crossing_tracts_scene(args.scene);
    fs::create_directories(args.out_dir);
    const fs::path dir(args.out_dir);
    write_volume(scene.mask.to_volume(scene.voxel_size_mm), dir / "mask.vol");
    write_odf_field(scene.odf, dir / "odf.odf");
    write_streamlines(scene.streamlines, dir / "streamlines.json");

    const json config = {{"size", args.scene.size},
                         {"voxel_size_mm", args.scene.voxel_size_mm},
                         {"tract_radius_mm", args.scene.tract_radius_mm},
                         {"odf_baseline", args.scene.odf_baseline},
                         {"odf_lobe_power", args.scene.odf_lobe_power},
                         {"streamlines_per_tract", args.scene.streamlines_per_tract},
                         {"streamline_point_spacing_mm", args.scene.streamline_point_spacing_mm},
                         {"seed", args.scene.seed}};
    write_provenance(dir / "scene", "synth-scene", config);
    std::cout << json({{"out_dir", args.out_dir},
                       {"n_mask_voxels", scene.mask.count()},
                       {"n_streamlines", scene.streamlines.size()}})
                     .dump()
              << '\n';
}

// ---------------------------------------------------------------------------
// build-graph
// ---------------------------------------------------------------------------

struct BuildGraphArgs {
    std::string mask_path;
    std::string odf_path;
    std::string out_path;
    GraphBuildConfig config;
};

void run_build_graph(const BuildGraphArgs& args) {
    const Mask mask = load_mask(args.mask_path);
    require_file(args.odf_path, "ODF field");
    const ODFField odf = read_odf_field(args.odf_path);

    auto [graph, report] = build_graph(mask, odf, args.config);
    write_graph(graph, args.out_path);
    write_provenance(args.out_path, "build-graph",
                     {{"mask", args.mask_path},
                      {"odf", args.odf_path},
                      {"sharpening_power", args.config.sharpening_power},
                      {"cone_cos_threshold", args.config.cone_cos_threshold},
                      {"min_weight_epsilon", args.config.min_weight_epsilon}});
    std::cout << report_to_json(report).dump() << '\n';
}

// ---------------------------------------------------------------------------
// phantom
// ---------------------------------------------------------------------------

struct PhantomArgs {
    std::string streamlines_path;
    std::string grid_like;
    std::vector<std::size_t> dims;
    std::vector<double> voxel_size{1.0, 1.0, 1.0};
    std::string out_dir;
    std::string from_provenance;
    PhantomSpec spec;
    BlockParadigm paradigm;
    unsigned threads = 1;
};

GridSpec resolve_grid(const PhantomArgs& args) {
    if (!args.grid_like.empty()) {
        require_file(args.grid_like, "grid template volume");
        const auto any = read_volume(args.grid_like);
        if (const auto* v3 = std::get_if<Volume3D>(&any)) return {v3->dims, v3->voxel_size_mm};
        const auto& v4 = std::get<Volume4D>(any);
        return {v4.dims, v4.voxel_size_mm};
    }
    if (args.dims.size() != 3) throw usage_error("phantom needs --dims or --grid-like");
    if (args.voxel_size.size() != 3) throw usage_error("--voxel-size-mm expects 3 values");
    return {{args.dims[0], args.dims[1], args.dims[2]},
            {args.voxel_size[0], args.voxel_size[1], args.voxel_size[2]}};
}

void run_phantom(PhantomArgs args) {
    GridSpec grid;
    if (!args.from_provenance.empty()) {
        const auto prov = read_phantom_provenance(args.from_provenance);
        grid = prov.grid;
        args.spec = prov.spec;
        args.paradigm = prov.paradigm;
        if (args.streamlines_path.empty()) args.streamlines_path = prov.streamlines_path;
        require_file(args.streamlines_path, "streamline file");
        if (fnv1a_file(args.streamlines_path) != prov.streamlines_fnv1a)
            throw usage_error("streamline file does not match the provenance fingerprint");
    } else {
        if (args.streamlines_path.empty()) throw usage_error("phantom needs --streamlines");
        require_file(args.streamlines_path, "streamline file");
        grid = resolve_grid(args);
    }

    const StreamlineSet streamlines = read_streamlines(args.streamlines_path);
    const PhantomBundle bundle =
        make_phantom(streamlines, grid, args.spec, args.paradigm, args.threads);

    PhantomProvenance provenance;
    provenance.grid = grid;
    provenance.spec = args.spec;
    provenance.paradigm = args.paradigm;
    provenance.streamlines_path = args.streamlines_path;
    provenance.streamlines_fnv1a = fnv1a_file(args.streamlines_path);
    write_phantom_bundle(args.out_dir, bundle, provenance);

    std::cout << json({{"out_dir", args.out_dir},
                       {"n_active_voxels", bundle.pattern.ground_truth_mask().count()},
                       {"n_frames", bundle.series.n_frames}})
                     .dump()
              << '\n';
}

// ---------------------------------------------------------------------------
// filter
// ---------------------------------------------------------------------------

struct FilterArgs {
    std::string series_path;
    std::string method;
    std::string out_path;
    std::string graph_path;
    std::string mask_path;
    double tau = 1.4;
    double fwhm_mm = 2.0;
    unsigned cheb_order = 50;
    unsigned threads = 1;
};

Mask mask_from_graph(const VoxelGraph& graph) {
    Mask mask;
    mask.dims = graph.dims;
    mask.voxels.assign(graph.dims[0] * graph.dims[1] * graph.dims[2], 0);
    for (std::uint64_t v : graph.vertex_to_voxel) mask.voxels[v] = 1;
    return mask;
}

Volume3D filter_volume3d_on_graph(const VoxelGraph& graph, const ChebApprox& approx,
                                  const Volume3D& vol) {
    Volume3D out = vol;
    const std::size_t n = graph.n_vertices();
    std::vector<double> signal(n), filtered(n);
    for (std::size_t i = 0; i < n; ++i) signal[i] = vol.data[graph.vertex_to_voxel[i]];
    cheb_apply(graph, approx, signal, filtered);
    for (std::size_t i = 0; i < n; ++i) out.data[graph.vertex_to_voxel[i]] = filtered[i];
    return out;
}

void run_filter(const FilterArgs& args) {
    require_file(args.series_path, "input volume");
    const AnyVolume input = read_volume(args.series_path);
    const auto dims_of = [](const AnyVolume& v) {
        return std::holds_alternative<Volume3D>(v) ? std::get<Volume3D>(v).dims
                                                   : std::get<Volume4D>(v).dims;
    };

    AnyVolume output = input;
    json config = {{"series", args.series_path}, {"method", args.method}};

    if (args.method == "gaussian") {
        const GaussianSpec spec{args.fwhm_mm, 4.0};
        config["fwhm_mm"] = args.fwhm_mm;
        if (const auto* v3 = std::get_if<Volume3D>(&input))
            output = gaussian_filter(*v3, spec);
        else
            output = gaussian_filter(std::get<Volume4D>(input), spec, args.threads);
    } else if (args.method == "graph" || args.method == "uniform-graph") {
        VoxelGraph graph;
        Mask mask;
        if (args.method == "graph") {
            if (args.graph_path.empty()) throw usage_error("graph method needs --graph");
            require_file(args.graph_path, "graph file");
            graph = read_graph(args.graph_path);
            mask = args.mask_path.empty() ? mask_from_graph(graph) : load_mask(args.mask_path);
            config["graph"] = args.graph_path;
        } else {
            if (args.mask_path.empty()) throw usage_error("uniform-graph method needs --mask");
            mask = load_mask(args.mask_path);
            graph = masked_uniform_graph(mask);
        }
        if (graph.dims != dims_of(input))
            throw usage_error("graph/series dimension mismatch");
        config["tau"] = args.tau;
        config["cheb_order"] = args.cheb_order;
        if (!args.mask_path.empty()) config["mask"] = args.mask_path;

        if (args.tau != 0.0) { // tau = 0 is the identity filter
            const auto approx = cheb_coefficients(HeatKernel{args.tau}, args.cheb_order);
            if (const auto* v3 = std::get_if<Volume3D>(&input))
                output = filter_volume3d_on_graph(graph, approx, *v3);
            else
                output = filter_timeseries(graph, approx, std::get<Volume4D>(input), mask,
                                           args.threads);
        }
    } else {
        throw usage_error("unknown filter method '" + args.method +
                          "' (expected graph, gaussian or uniform-graph)");
    }

    std::visit([&](const auto& vol) { write_volume(vol, args.out_path); }, output);
    write_provenance(args.out_path, "filter", config);
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string series_path;
    std::string out_path;
    std::string mask_path;
    BlockParadigm paradigm;
    unsigned threads = 1;
};

void run_analyze(const AnalyzeArgs& args) {
    require_file(args.series_path, "series volume");
    const Volume4D series = read_volume4d(args.series_path);
    if (series.n_frames != args.paradigm.n_frames)
        throw usage_error("paradigm frame count (" + std::to_string(args.paradigm.n_frames) +
                          ") does not match series (" + std::to_string(series.n_frames) + ")");

    std::optional<Mask> mask;
    if (!args.mask_path.empty()) mask = load_mask(args.mask_path);

    const auto design = DesignMatrix::from_regressor(unit_regressor(args.paradigm));
    const auto fit = glm_fit(series, design, mask ? &*mask : nullptr, args.threads);
    const TMap tmap = t_map(fit);
    write_volume(tmap.t, args.out_path);

    json config = {{"series", args.series_path},
                   {"dof", tmap.dof},
                   {"paradigm",
                    {{"n_frames", args.paradigm.n_frames},
                     {"tr_seconds", args.paradigm.tr_seconds},
                     {"block_on_frames", args.paradigm.block_on_frames},
                     {"block_off_frames", args.paradigm.block_off_frames},
                     {"amplitude_scale", args.paradigm.amplitude_scale}}}};
    if (!args.mask_path.empty()) config["mask"] = args.mask_path;
    write_provenance(args.out_path, "analyze", config);
    std::cout << json({{"out", args.out_path}, {"dof", tmap.dof}}).dump() << '\n';
}

// ---------------------------------------------------------------------------
// roc
// ---------------------------------------------------------------------------

struct RocArgs {
    std::vector<std::string> tmap_paths;
    std::vector<std::string> truth_paths;
    std::string mask_path;
    std::string out_csv;
    std::string out_json;
    std::string filter_label = "unspecified";
    double param = 0.0;
    std::size_t n_thresholds = 200;
};

void run_roc(const RocArgs& args) {
    if (args.tmap_paths.empty()) throw usage_error("roc needs at least one --tmap");
    if (args.tmap_paths.size() != args.truth_paths.size())
        throw usage_error("roc needs matching --tmap and --truth lists");

    std::optional<Mask> mask;
    if (!args.mask_path.empty()) mask = load_mask(args.mask_path);

    std::vector<RocCurve> curves;
    for (std::size_t i = 0; i < args.tmap_paths.size(); ++i) {
        require_file(args.tmap_paths[i], "t-map volume");
        require_file(args.truth_paths[i], "ground truth volume");
        TMap tmap;
        tmap.t = read_volume3d(args.tmap_paths[i]);
        if (mask) {
            if (mask->dims != tmap.t.dims) throw usage_error("mask/t-map dimension mismatch");
            tmap.analysis_mask = *mask;
        } else {
            tmap.analysis_mask.dims = tmap.t.dims;
            tmap.analysis_mask.voxels.assign(tmap.t.n_voxels(), 1);
        }
        const Mask truth = Mask::from_volume(read_volume3d(args.truth_paths[i]));
        curves.push_back(roc_curve(tmap, truth, args.n_thresholds));
    }

    const RocCurve averaged = average_roc(curves);
    write_roc_csv(averaged, args.out_csv);
    const json summary = {{"filter", args.filter_label},
                          {"param", args.param},
                          {"auc", averaged.auc},
                          {"n_phantoms", curves.size()}};
    if (!args.out_json.empty()) {
        std::ofstream os(args.out_json, std::ios::binary | std::ios::trunc);
        if (!os) throw io_error("cannot open for writing: " + args.out_json);
        os << summary.dump(2) << '\n';
    }
    write_provenance(args.out_csv, "roc",
                     {{"tmaps", args.tmap_paths},
                      {"truths", args.truth_paths},
                      {"filter", args.filter_label},
                      {"param", args.param},
                      {"n_thresholds", args.n_thresholds}});
    std::cout << summary.dump() << '\n';
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

struct PipelineArgs {
    std::string config_path;
    std::string out_dir;
    std::string threads_text;
    std::vector<double> taus;     // overrides filters.taus when given
    std::vector<double> fwhms_mm; // overrides filters.fwhms_mm when given
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> cheb_order;
};

void run_pipeline(const PipelineArgs& args) {
    const json config = load_config_file(args.config_path);
    const fs::path dir(args.out_dir);
    fs::create_directories(dir);

    // Inputs: either a synthetic scene block or explicit file paths.
    Mask mask;
    ODFField odf;
    StreamlineSet streamlines;
    std::array<double, 3> voxel_size{1.0, 1.0, 1.0};
    if (config.contains("scene")) {
        SceneConfig scene_config;
        const json& s = config["scene"];
        cfg(s, "size", scene_config.size);
        cfg(s, "voxel_size_mm", scene_config.voxel_size_mm);
        cfg(s, "tract_radius_mm", scene_config.tract_radius_mm);
        cfg(s, "odf_baseline", scene_config.odf_baseline);
        cfg(s, "odf_lobe_power", scene_config.odf_lobe_power);
        cfg(s, "streamlines_per_tract", scene_config.streamlines_per_tract);
        cfg(s, "streamline_point_spacing_mm", scene_config.streamline_point_spacing_mm);
        cfg(s, "seed", scene_config.seed);
        Scene scene = make_crossing_tracts_scene(scene_config);
        mask = std::move(scene.mask);
        odf = std::move(scene.odf);
        streamlines = std::move(scene.streamlines);
        voxel_size = scene.voxel_size_mm;
        write_volume(mask.to_volume(voxel_size), dir / "mask.vol");
        write_odf_field(odf, dir / "odf.odf");
        write_streamlines(streamlines, dir / "streamlines.json");
    } else if (config.contains("inputs")) {
        const json& in = config["inputs"];
        std::string mask_path, odf_path, streamlines_path;
        cfg(in, "mask", mask_path);
        cfg(in, "odf", odf_path);
        cfg(in, "streamlines", streamlines_path);
        const Volume3D mask_vol = read_volume3d(mask_path);
        voxel_size = mask_vol.voxel_size_mm;
        mask = Mask::from_volume(mask_vol);
        odf = read_odf_field(odf_path);
        streamlines = read_streamlines(streamlines_path);
    } else {
        throw usage_error("pipeline config needs a 'scene' or 'inputs' section");
    }

    ExperimentConfig exp;
    exp.voxel_size_mm = voxel_size;
    if (config.contains("graph")) {
        const json& g = config["graph"];
        cfg(g, "sharpening_power", exp.graph.sharpening_power);
        cfg(g, "cone_cos_threshold", exp.graph.cone_cos_threshold);
        cfg(g, "min_weight_epsilon", exp.graph.min_weight_epsilon);
    }
    if (config.contains("phantom")) {
        const json& p = config["phantom"];
        cfg(p, "n_phantoms", exp.n_phantoms);
        cfg(p, "base_seed", exp.base_seed);
        cfg(p, "n_streamlines", exp.phantom.n_streamlines);
        cfg(p, "diffusion_sigma_mm", exp.phantom.diffusion_sigma_mm);
        cfg(p, "noise_sigma", exp.phantom.noise_sigma);
        cfg(p, "activation_floor", exp.phantom.activation_floor);
    }
    if (config.contains("paradigm")) {
        const json& p = config["paradigm"];
        cfg(p, "n_frames", exp.paradigm.n_frames);
        cfg(p, "tr_seconds", exp.paradigm.tr_seconds);
        cfg(p, "block_on_frames", exp.paradigm.block_on_frames);
        cfg(p, "block_off_frames", exp.paradigm.block_off_frames);
        cfg(p, "amplitude_scale", exp.paradigm.amplitude_scale);
    }
    if (config.contains("filters")) {
        const json& f = config["filters"];
        cfg(f, "taus", exp.filters.graph_taus);
        cfg(f, "fwhms_mm", exp.filters.gaussian_fwhms_mm);
        cfg(f, "uniform_graph_taus", exp.filters.uniform_graph_taus);
        cfg(f, "include_unfiltered", exp.filters.include_unfiltered);
    }
    cfg(config, "cheb_order", exp.cheb_order);
    cfg(config, "n_thresholds", exp.n_thresholds);
    unsigned threads = 1;
    cfg(config, "threads", threads);
    if (!args.threads_text.empty()) threads = parse_threads(args.threads_text);
    exp.threads = threads;

    // Flag overrides on top of the config file.
    if (!args.taus.empty()) exp.filters.graph_taus = args.taus;
    if (!args.fwhms_mm.empty()) exp.filters.gaussian_fwhms_mm = args.fwhms_mm;
    if (args.seed) exp.base_seed = *args.seed;
    if (args.cheb_order) exp.cheb_order = *args.cheb_order;

    const ExperimentResult result = run_roc_experiment(mask, odf, streamlines, exp);

    // One averaged curve per method, plus a machine-readable summary.
    json methods = json::array();
    for (const auto& m : result.methods) {
        std::string name = "roc_" + m.method;
        if (m.method != "unfiltered") name += "_" + format_double(m.param);
        write_roc_csv(m.averaged, dir / (name + ".csv"));
        methods.push_back({{"method", m.method},
                           {"param", m.param},
                           {"auc", m.averaged.auc},
                           {"csv", name + ".csv"}});
    }
    json summary = {{"methods", methods},
                    {"graph_report", report_to_json(result.graph_report)},
                    {"n_phantoms", exp.n_phantoms}};
    {
        std::ofstream os(dir / "summary.json", std::ios::binary | std::ios::trunc);
        if (!os) throw io_error("cannot write summary.json");
        os << summary.dump(2) << '\n';
    }
    // Echo the fully resolved configuration (file + flag overrides).
    // Threads are an execution detail, not configuration: outputs must be
    // byte-identical at any thread count, provenance included.
    json effective = config;
    effective.erase("threads");
    effective["graph"] = {{"sharpening_power", exp.graph.sharpening_power},
                          {"cone_cos_threshold", exp.graph.cone_cos_threshold},
                          {"min_weight_epsilon", exp.graph.min_weight_epsilon}};
    effective["phantom"] = {{"n_phantoms", exp.n_phantoms},
                            {"base_seed", exp.base_seed},
                            {"n_streamlines", exp.phantom.n_streamlines},
                            {"diffusion_sigma_mm", exp.phantom.diffusion_sigma_mm},
                            {"noise_sigma", exp.phantom.noise_sigma},
                            {"activation_floor", exp.phantom.activation_floor}};
    effective["paradigm"] = {{"n_frames", exp.paradigm.n_frames},
                             {"tr_seconds", exp.paradigm.tr_seconds},
                             {"block_on_frames", exp.paradigm.block_on_frames},
                             {"block_off_frames", exp.paradigm.block_off_frames},
                             {"amplitude_scale", exp.paradigm.amplitude_scale}};
    effective["filters"] = {{"taus", exp.filters.graph_taus},
                            {"fwhms_mm", exp.filters.gaussian_fwhms_mm},
                            {"uniform_graph_taus", exp.filters.uniform_graph_taus},
                            {"include_unfiltered", exp.filters.include_unfiltered}};
    effective["cheb_order"] = exp.cheb_order;
    effective["n_thresholds"] = exp.n_thresholds;
    write_provenance(dir / "pipeline", "pipeline", effective);
    std::cout << summary.dump() << '\n';
}

// ---------------------------------------------------------------------------
// wiring
// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args) {
    const json file_config = peek_config(args);

    CLI::App app{"white-matter graph filtering toolkit"};
    app.name("wmgf");
    app.require_subcommand(1);

    std::string config_path_sink;

    // --- synth-scene ---
    auto args_scene = std::make_shared<SynthSceneArgs>();
    {
        const json& c = file_config;
        cfg(c, "size", args_scene->scene.size);
        cfg(c, "voxel_size_mm", args_scene->scene.voxel_size_mm);
        cfg(c, "tract_radius_mm", args_scene->scene.tract_radius_mm);
        cfg(c, "odf_baseline", args_scene->scene.odf_baseline);
        cfg(c, "odf_lobe_power", args_scene->scene.odf_lobe_power);
        cfg(c, "streamlines_per_tract", args_scene->scene.streamlines_per_tract);
        cfg(c, "seed", args_scene->scene.seed);
    }
    CLI::App* scene = app.add_subcommand("synth-scene", "generate a crossing-tracts test scene");
    scene->add_option("--config", config_path_sink, "JSON config file");
    scene->add_option("--out-dir", args_scene->out_dir, "output directory")->required();
    scene->add_option("--size", args_scene->scene.size, "cubic grid size");
    scene->add_option("--voxel-size-mm", args_scene->scene.voxel_size_mm, "voxel edge length");
    scene->add_option("--tract-radius-mm", args_scene->scene.tract_radius_mm, "tract radius");
    scene->add_option("--odf-baseline", args_scene->scene.odf_baseline, "isotropic ODF floor");
    scene->add_option("--odf-lobe-power", args_scene->scene.odf_lobe_power, "lobe sharpness");
    scene->add_option("--streamlines-per-tract", args_scene->scene.streamlines_per_tract,
                      "streamlines per tract");
    scene->add_option("--seed", args_scene->scene.seed, "RNG seed")->required();
    scene->callback([args_scene] { run_synth_scene(*args_scene); });

    // --- build-graph ---
    auto args_graph = std::make_shared<BuildGraphArgs>();
    {
        const json& c = file_config;
        cfg(c, "sharpening_power", args_graph->config.sharpening_power);
        cfg(c, "cone_cos_threshold", args_graph->config.cone_cos_threshold);
        cfg(c, "min_weight_epsilon", args_graph->config.min_weight_epsilon);
    }
    CLI::App* bg = app.add_subcommand("build-graph", "build the ODF-weighted voxel graph");
    bg->add_option("--config", config_path_sink, "JSON config file");
    bg->add_option("--mask", args_graph->mask_path, "white-matter mask volume")->required();
    bg->add_option("--odf", args_graph->odf_path, "ODF field file")->required();
    bg->add_option("--out", args_graph->out_path, "output graph file")->required();
    bg->add_option("--power", args_graph->config.sharpening_power, "ODF sharpening power");
    bg->add_option("--cone-cos", args_graph->config.cone_cos_threshold,
                   "cone membership cosine threshold");
    bg->add_option("--min-weight", args_graph->config.min_weight_epsilon,
                   "drop edges below this weight");
    bg->callback([args_graph] { run_build_graph(*args_graph); });

    // --- phantom ---
    auto args_ph = std::make_shared<PhantomArgs>();
    {
        const json& c = file_config;
        cfg(c, "n_streamlines", args_ph->spec.n_streamlines);
        cfg(c, "diffusion_sigma_mm", args_ph->spec.diffusion_sigma_mm);
        cfg(c, "noise_sigma", args_ph->spec.noise_sigma);
        cfg(c, "activation_floor", args_ph->spec.activation_floor);
        cfg(c, "n_frames", args_ph->paradigm.n_frames);
        cfg(c, "tr_seconds", args_ph->paradigm.tr_seconds);
        cfg(c, "block_on_frames", args_ph->paradigm.block_on_frames);
        cfg(c, "block_off_frames", args_ph->paradigm.block_off_frames);
        cfg(c, "amplitude_scale", args_ph->paradigm.amplitude_scale);
    }
    CLI::App* ph = app.add_subcommand("phantom", "synthesize a semi-synthetic phantom bundle");
    ph->add_option("--config", config_path_sink, "JSON config file");
    ph->add_option("--streamlines", args_ph->streamlines_path, "streamline JSON file");
    ph->add_option("--grid-like", args_ph->grid_like, "take grid from this volume");
    ph->add_option("--dims", args_ph->dims, "grid dims")->expected(3);
    ph->add_option("--voxel-size-mm", args_ph->voxel_size, "voxel sizes")->expected(3);
    ph->add_option("--out-dir", args_ph->out_dir, "bundle output directory")->required();
    ph->add_option("--from-provenance", args_ph->from_provenance,
                   "regenerate a bundle from its provenance record");
    ph->add_option("--seed", args_ph->spec.rng_seed, "RNG seed");
    ph->add_option("--n-streamlines", args_ph->spec.n_streamlines, "streamlines per phantom");
    ph->add_option("--diffusion-sigma-mm", args_ph->spec.diffusion_sigma_mm,
                   "activation spread along the streamline");
    ph->add_option("--noise-sigma", args_ph->spec.noise_sigma, "additive noise sigma");
    ph->add_option("--activation-floor", args_ph->spec.activation_floor,
                   "ground-truth binarization floor");
    ph->add_option("--n-frames", args_ph->paradigm.n_frames, "time frames");
    ph->add_option("--tr-seconds", args_ph->paradigm.tr_seconds, "repetition time");
    ph->add_option("--block-on", args_ph->paradigm.block_on_frames, "on-block frames");
    ph->add_option("--block-off", args_ph->paradigm.block_off_frames, "off-block frames");
    ph->add_option("--amplitude-scale", args_ph->paradigm.amplitude_scale, "regressor amplitude");
    auto* ph_threads = ph->add_option_function<std::string>(
        "--threads", [args_ph](const std::string& t) { args_ph->threads = parse_threads(t); },
        "worker threads (integer or 'auto')");
    (void)ph_threads;
    auto* ph_seed = ph->get_option("--seed");
    ph->callback([args_ph, ph_seed] {
        // Seed is mandatory for fresh synthesis; provenance replays carry their own.
        if (args_ph->from_provenance.empty() && ph_seed->count() == 0)
            throw usage_error("phantom needs --seed (or --from-provenance)");
        run_phantom(*args_ph);
    });

    // --- filter ---
    auto args_fl = std::make_shared<FilterArgs>();
    {
        const json& c = file_config;
        cfg(c, "tau", args_fl->tau);
        cfg(c, "fwhm_mm", args_fl->fwhm_mm);
        cfg(c, "cheb_order", args_fl->cheb_order);
        cfg(c, "method", args_fl->method);
    }
    CLI::App* fl = app.add_subcommand("filter", "spatially filter a volume or time-series");
    fl->add_option("--config", config_path_sink, "JSON config file");
    fl->add_option("--series", args_fl->series_path, "input volume (3D or 4D)")->required();
    fl->add_option("--method", args_fl->method, "graph | gaussian | uniform-graph")
        ->required(args_fl->method.empty());
    fl->add_option("--out", args_fl->out_path, "output volume path")->required();
    fl->add_option("--graph", args_fl->graph_path, "graph file (graph method)");
    fl->add_option("--mask", args_fl->mask_path, "mask volume");
    fl->add_option("--tau", args_fl->tau, "heat kernel tau");
    fl->add_option("--fwhm-mm", args_fl->fwhm_mm, "Gaussian FWHM in mm");
    fl->add_option("--cheb-order", args_fl->cheb_order, "Chebyshev order K");
    fl->add_option_function<std::string>(
        "--threads", [args_fl](const std::string& t) { args_fl->threads = parse_threads(t); },
        "worker threads (integer or 'auto')");
    fl->callback([args_fl] { run_filter(*args_fl); });

    // --- analyze ---
    auto args_an = std::make_shared<AnalyzeArgs>();
    {
        const json& c = file_config;
        cfg(c, "n_frames", args_an->paradigm.n_frames);
        cfg(c, "tr_seconds", args_an->paradigm.tr_seconds);
        cfg(c, "block_on_frames", args_an->paradigm.block_on_frames);
        cfg(c, "block_off_frames", args_an->paradigm.block_off_frames);
        cfg(c, "amplitude_scale", args_an->paradigm.amplitude_scale);
    }
    CLI::App* an = app.add_subcommand("analyze", "GLM activation mapping -> t-map");
    an->add_option("--config", config_path_sink, "JSON config file");
    an->add_option("--series", args_an->series_path, "input 4D series")->required();
    an->add_option("--out", args_an->out_path, "output t-map volume")->required();
    an->add_option("--mask", args_an->mask_path, "analysis mask volume");
    an->add_option("--n-frames", args_an->paradigm.n_frames, "time frames");
    an->add_option("--tr-seconds", args_an->paradigm.tr_seconds, "repetition time");
    an->add_option("--block-on", args_an->paradigm.block_on_frames, "on-block frames");
    an->add_option("--block-off", args_an->paradigm.block_off_frames, "off-block frames");
    an->add_option("--amplitude-scale", args_an->paradigm.amplitude_scale, "regressor amplitude");
    an->add_option_function<std::string>(
        "--threads", [args_an](const std::string& t) { args_an->threads = parse_threads(t); },
        "worker threads (integer or 'auto')");
    an->callback([args_an] { run_analyze(*args_an); });

    // --- roc ---
    auto args_roc = std::make_shared<RocArgs>();
    cfg(file_config, "n_thresholds", args_roc->n_thresholds);
    CLI::App* roc = app.add_subcommand("roc", "multi-threshold ROC against ground truth");
    roc->add_option("--config", config_path_sink, "JSON config file");
    roc->add_option("--tmap", args_roc->tmap_paths, "t-map volume (repeatable)")
        ->take_all()
        ->required();
    roc->add_option("--truth", args_roc->truth_paths, "ground truth volume (repeatable)")
        ->take_all()
        ->required();
    roc->add_option("--mask", args_roc->mask_path, "scoring mask volume");
    roc->add_option("--out-csv", args_roc->out_csv, "averaged ROC CSV path")->required();
    roc->add_option("--out-json", args_roc->out_json, "AUC summary JSON path");
    roc->add_option("--filter-label", args_roc->filter_label, "label for the summary");
    roc->add_option("--param", args_roc->param, "filter parameter for the summary");
    roc->add_option("--n-thresholds", args_roc->n_thresholds, "threshold sweep size");
    roc->callback([args_roc] { run_roc(*args_roc); });

    // --- pipeline ---
    auto args_pl = std::make_shared<PipelineArgs>();
    CLI::App* pl = app.add_subcommand("pipeline",
                                      "phantom -> filter -> analyze -> roc in one run");
    pl->add_option("--config", args_pl->config_path, "experiment JSON config")->required();
    pl->add_option("--out-dir", args_pl->out_dir, "output directory")->required();
    pl->add_option("--threads", args_pl->threads_text, "worker threads (integer or 'auto')");
    pl->add_option("--tau", args_pl->taus, "graph filter tau grid (overrides config)");
    pl->add_option("--fwhm-mm", args_pl->fwhms_mm, "Gaussian FWHM grid (overrides config)");
    pl->add_option_function<std::uint64_t>(
        "--seed", [args_pl](std::uint64_t s) { args_pl->seed = s; },
        "base phantom seed (overrides config)");
    pl->add_option_function<unsigned>(
        "--cheb-order", [args_pl](unsigned k) { args_pl->cheb_order = k; },
        "Chebyshev order (overrides config)");
    pl->callback([args_pl] { run_pipeline(*args_pl); });

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("wmgf");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << json({{"error", e.what()}, {"exit_code", 2}}).dump() << '\n';
        return 2;
    }
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    try {
        return dispatch(args);
    } catch (const usage_error& e) {
        std::cerr << json({{"error", e.what()}, {"exit_code", 2}}).dump() << '\n';
        return 2;
    } catch (const format_error& e) {
        std::cerr << json({{"error", e.what()}, {"exit_code", 2}}).dump() << '\n';
        return 2;
    } catch (const io_error& e) {
        std::cerr << json({{"error", e.what()}, {"exit_code", 2}}).dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json({{"error", e.what()}, {"exit_code", 1}}).dump() << '\n';
        return 1;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_cli(args);
}

} // namespace wmgf
