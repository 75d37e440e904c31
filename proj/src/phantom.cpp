#include "wmgf/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "wmgf/io.hpp"
#include "wmgf/parallel.hpp"

namespace wmgf {

namespace {

using nlohmann::json;

// Substream id for time-series noise; streamline origins use streams
// 0..n_streamlines-1 of the same seed.
constexpr std::uint64_t kNoiseStream = 0x8000000000000000ull;

struct ArcTable {
    std::vector<double> cumulative; // arc length at each polyline point
    double total = 0.0;
};

ArcTable arc_table(const Streamline& line) {
    ArcTable t;
    t.cumulative.resize(line.size());
    t.cumulative[0] = 0.0;
    for (std::size_t i = 1; i < line.size(); ++i) {
        const double seg = norm(line[i] - line[i - 1]);
        t.cumulative[i] = t.cumulative[i - 1] + seg;
    }
    t.total = t.cumulative.back();
    return t;
}

Vec3 point_at_arclength(const Streamline& line, const ArcTable& table, double s) {
    if (s <= 0.0) return line.front();
    if (s >= table.total) return line.back();
    const auto it = std::upper_bound(table.cumulative.begin(), table.cumulative.end(), s);
    const std::size_t seg = static_cast<std::size_t>(it - table.cumulative.begin());
    const double s0 = table.cumulative[seg - 1];
    const double frac = (s - s0) / (table.cumulative[seg] - s0);
    return line[seg - 1] + frac * (line[seg] - line[seg - 1]);
}

} // namespace

void GridSpec::validate() const {
    if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0)
        throw shape_error("GridSpec: dims must be positive");
    for (double s : voxel_size_mm)
        if (!(s > 0.0)) throw shape_error("GridSpec: voxel sizes must be strictly positive");
}

Mask ActivationPattern::ground_truth_mask() const {
    Mask m;
    m.dims = amplitude.dims;
    m.voxels.resize(amplitude.data.size());
    for (std::size_t i = 0; i < amplitude.data.size(); ++i)
        m.voxels[i] = amplitude.data[i] > activation_floor;
    return m;
}

void ActivationPattern::validate() const {
    amplitude.validate();
    for (double a : amplitude.data)
        if (!(a >= 0.0 && a <= 1.0))
            throw std::domain_error("ActivationPattern: amplitude outside [0,1]");
}

void BlockParadigm::validate() const {
    if (block_on_frames < 1 || block_off_frames < 1)
        throw std::domain_error("BlockParadigm: on/off blocks need at least one frame");
    if (n_frames < 2 * (block_on_frames + block_off_frames))
        throw std::domain_error("BlockParadigm: need at least two full cycles");
    if (!(tr_seconds > 0.0)) throw std::domain_error("BlockParadigm: tr_seconds must be positive");
}

void PhantomSpec::validate() const {
    if (n_streamlines < 1) throw std::domain_error("PhantomSpec: need at least one streamline");
    if (!(noise_sigma >= 0.0)) throw std::domain_error("PhantomSpec: noise_sigma must be >= 0");
    if (!(diffusion_sigma_mm >= 0.0))
        throw std::domain_error("PhantomSpec: diffusion_sigma_mm must be >= 0");
    if (!(activation_floor >= 0.0 && activation_floor < 1.0))
        throw std::domain_error("PhantomSpec: activation_floor must lie in [0,1)");
}

ActivationPattern streamline_activation(const Streamline& line, const GridSpec& grid,
                                        double diffusion_sigma_mm, Rng& rng,
                                        double activation_floor) {
    grid.validate();
    if (line.size() < 2) throw std::domain_error("streamline_activation: degenerate streamline");
    const ArcTable table = arc_table(line);
    if (!(table.total > 0.0))
        throw std::domain_error("streamline_activation: zero-length streamline");

    ActivationPattern pattern;
    pattern.amplitude = Volume3D::zeros(grid.dims, grid.voxel_size_mm);
    pattern.activation_floor = activation_floor;

    const double s0 = rng.next_uniform(0.0, table.total);
    const double step = std::min({grid.voxel_size_mm[0], grid.voxel_size_mm[1],
                                  grid.voxel_size_mm[2]});
    const double sigma = diffusion_sigma_mm;

    // Profile samples at s0 + m*step covering [0, total]; the m = 0 sample
    // lands exactly on the origin with amplitude 1.
    const long m_lo = -static_cast<long>(std::floor(s0 / step));
    const long m_hi = static_cast<long>(std::floor((table.total - s0) / step));
    for (long m = m_lo; m <= m_hi; ++m) {
        const double s = s0 + static_cast<double>(m) * step;
        double amp;
        if (sigma > 0.0) {
            const double d = static_cast<double>(m) * step;
            amp = std::exp(-(d * d) / (2.0 * sigma * sigma));
        } else {
            amp = (m == 0) ? 1.0 : 0.0;
        }
        if (amp == 0.0) continue;
        const Vec3 p = point_at_arclength(line, table, s);
        const long vx = static_cast<long>(std::floor(p.x / grid.voxel_size_mm[0]));
        const long vy = static_cast<long>(std::floor(p.y / grid.voxel_size_mm[1]));
        const long vz = static_cast<long>(std::floor(p.z / grid.voxel_size_mm[2]));
        if (vx < 0 || vy < 0 || vz < 0 || vx >= static_cast<long>(grid.dims[0]) ||
            vy >= static_cast<long>(grid.dims[1]) || vz >= static_cast<long>(grid.dims[2]))
            continue;
        double& cell = pattern.amplitude.at(static_cast<std::size_t>(vx),
                                            static_cast<std::size_t>(vy),
                                            static_cast<std::size_t>(vz));
        cell = std::max(cell, amp);
    }
    return pattern;
}

ActivationPattern combine_patterns(std::span<const ActivationPattern> patterns) {
    if (patterns.empty()) throw std::domain_error("combine_patterns: empty pattern list");
    ActivationPattern out = patterns[0];
    for (std::size_t k = 1; k < patterns.size(); ++k) {
        const auto& p = patterns[k];
        if (p.amplitude.dims != out.amplitude.dims ||
            p.amplitude.voxel_size_mm != out.amplitude.voxel_size_mm)
            throw shape_error("combine_patterns: grid mismatch");
        if (p.activation_floor != out.activation_floor)
            throw shape_error("combine_patterns: activation floor mismatch");
        for (std::size_t i = 0; i < out.amplitude.data.size(); ++i)
            out.amplitude.data[i] = std::max(out.amplitude.data[i], p.amplitude.data[i]);
    }
    return out;
}

std::vector<double> block_regressor(const BlockParadigm& paradigm) {
    paradigm.validate();
    std::vector<double> x(paradigm.n_frames);
    const std::size_t cycle = paradigm.block_on_frames + paradigm.block_off_frames;
    for (std::size_t t = 0; t < paradigm.n_frames; ++t)
        x[t] = (t % cycle >= paradigm.block_off_frames) ? paradigm.amplitude_scale : 0.0;
    return x;
}

std::vector<double> unit_regressor(const BlockParadigm& paradigm) {
    BlockParadigm unit = paradigm;
    unit.amplitude_scale = 1.0;
    return block_regressor(unit);
}

std::vector<double> centered_regressor(const BlockParadigm& paradigm) {
    auto x = block_regressor(paradigm);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    for (double& v : x) v -= mean;
    return x;
}

Volume4D synthesize_timeseries(const ActivationPattern& pattern, std::span<const double> regressor,
                               double noise_sigma, std::uint64_t rng_seed, double tr_seconds) {
    pattern.validate();
    if (!(noise_sigma >= 0.0))
        throw std::domain_error("synthesize_timeseries: negative noise sigma");
    if (regressor.size() < 2)
        throw shape_error("synthesize_timeseries: need at least two frames");

    const std::size_t n_vox = pattern.amplitude.n_voxels();
    const std::size_t n_frames = regressor.size();
    Volume4D out = Volume4D::zeros(pattern.amplitude.dims, n_frames,
                                   pattern.amplitude.voxel_size_mm, tr_seconds);
    for (std::size_t v = 0; v < n_vox; ++v) {
        const double amp = pattern.amplitude.data[v];
        for (std::size_t t = 0; t < n_frames; ++t) {
            double y = amp * regressor[t];
            if (noise_sigma > 0.0)
                y += noise_sigma * rng_normal(rng_seed, kNoiseStream, v * n_frames + t);
            out.data[v + n_vox * t] = y;
        }
    }
    return out;
}

PhantomBundle make_phantom(const StreamlineSet& streamlines, const GridSpec& grid,
                           const PhantomSpec& spec, const BlockParadigm& paradigm,
                           unsigned threads) {
    spec.validate();
    paradigm.validate();
    grid.validate();
    if (streamlines.size() < spec.n_streamlines)
        throw std::domain_error("make_phantom: streamline set smaller than n_streamlines");

    std::vector<ActivationPattern> patterns(spec.n_streamlines);
    parallel_for(spec.n_streamlines, threads, [&](std::size_t i) {
        Rng rng(spec.rng_seed, i);
        patterns[i] = streamline_activation(streamlines.streamlines[i], grid,
                                            spec.diffusion_sigma_mm, rng,
                                            spec.activation_floor);
    });

    PhantomBundle bundle;
    bundle.pattern = combine_patterns(patterns);
    const auto regressor = block_regressor(paradigm);
    bundle.series = synthesize_timeseries(bundle.pattern, regressor, spec.noise_sigma,
                                          spec.rng_seed, paradigm.tr_seconds);
    return bundle;
}

void write_phantom_bundle(const std::filesystem::path& dir, const PhantomBundle& bundle,
                          const PhantomProvenance& provenance) {
    std::filesystem::create_directories(dir);
    write_volume(bundle.pattern.amplitude, dir / "amplitude.vol");
    write_volume(bundle.pattern.ground_truth_mask().to_volume(
                     bundle.pattern.amplitude.voxel_size_mm),
                 dir / "truth.vol");
    write_volume(bundle.series, dir / "series.vol");

    json prov;
    prov["grid"] = {{"dims", provenance.grid.dims},
                    {"voxel_size_mm", provenance.grid.voxel_size_mm}};
    prov["phantom"] = {{"n_streamlines", provenance.spec.n_streamlines},
                       {"diffusion_sigma_mm", provenance.spec.diffusion_sigma_mm},
                       {"noise_sigma", provenance.spec.noise_sigma},
                       {"rng_seed", provenance.spec.rng_seed},
                       {"activation_floor", provenance.spec.activation_floor}};
    prov["paradigm"] = {{"n_frames", provenance.paradigm.n_frames},
                        {"tr_seconds", provenance.paradigm.tr_seconds},
                        {"block_on_frames", provenance.paradigm.block_on_frames},
                        {"block_off_frames", provenance.paradigm.block_off_frames},
                        {"amplitude_scale", provenance.paradigm.amplitude_scale}};
    prov["streamlines"] = {{"path", provenance.streamlines_path},
                           {"fnv1a", provenance.streamlines_fnv1a}};
    std::ofstream os(dir / "provenance.json", std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot write provenance.json in " + dir.string());
    os << prov.dump(2) << '\n';
}

PhantomProvenance read_phantom_provenance(const std::filesystem::path& json_path) {
    std::ifstream is(json_path, std::ios::binary);
    if (!is) throw io_error("cannot open provenance: " + json_path.string());
    json prov = json::parse(is, nullptr, false);
    if (prov.is_discarded()) throw format_error("provenance is not valid JSON: " + json_path.string());

    try {
        PhantomProvenance out;
        out.grid.dims = prov.at("grid").at("dims").get<Dims3>();
        out.grid.voxel_size_mm = prov.at("grid").at("voxel_size_mm").get<std::array<double, 3>>();
        const auto& ph = prov.at("phantom");
        out.spec.n_streamlines = ph.at("n_streamlines").get<std::size_t>();
        out.spec.diffusion_sigma_mm = ph.at("diffusion_sigma_mm").get<double>();
        out.spec.noise_sigma = ph.at("noise_sigma").get<double>();
        out.spec.rng_seed = ph.at("rng_seed").get<std::uint64_t>();
        out.spec.activation_floor = ph.at("activation_floor").get<double>();
        const auto& pa = prov.at("paradigm");
        out.paradigm.n_frames = pa.at("n_frames").get<std::size_t>();
        out.paradigm.tr_seconds = pa.at("tr_seconds").get<double>();
        out.paradigm.block_on_frames = pa.at("block_on_frames").get<std::size_t>();
        out.paradigm.block_off_frames = pa.at("block_off_frames").get<std::size_t>();
        out.paradigm.amplitude_scale = pa.at("amplitude_scale").get<double>();
        const auto& sl = prov.at("streamlines");
        out.streamlines_path = sl.at("path").get<std::string>();
        out.streamlines_fnv1a = sl.at("fnv1a").get<std::uint64_t>();
        return out;
    } catch (const json::exception& e) {
        throw format_error("malformed provenance " + json_path.string() + ": " + e.what());
    }
}

} // namespace wmgf
