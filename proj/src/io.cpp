#include "wmgf/io.hpp"

#include <fstream>
#include <limits>

#include "json.hpp"

#include "binary_io.hpp"

namespace wmgf {

namespace {

using nlohmann::json;
using namespace wmgf::detail;

json read_header_line(std::istream& is, const std::filesystem::path& path) {
    std::string line;
    if (!std::getline(is, line)) throw format_error("missing header line in " + path.string());
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || !header.is_object())
        throw format_error("header is not a JSON object in " + path.string());
    return header;
}

std::array<double, 3> parse_voxel_size(const json& header) {
    if (!header.contains("voxel_size_mm") || !header["voxel_size_mm"].is_array() ||
        header["voxel_size_mm"].size() != 3)
        throw format_error("volume header: 'voxel_size_mm' must be an array of 3 reals");
    std::array<double, 3> vs;
    for (int i = 0; i < 3; ++i) {
        if (!header["voxel_size_mm"][i].is_number())
            throw format_error("volume header: 'voxel_size_mm' entries must be numbers");
        vs[i] = header["voxel_size_mm"][i].get<double>();
        if (!(vs[i] > 0.0))
            throw format_error("volume header: 'voxel_size_mm' must be strictly positive");
    }
    return vs;
}

std::vector<std::uint64_t> parse_dims(const json& header, std::size_t lo, std::size_t hi) {
    if (!header.contains("dims") || !header["dims"].is_array())
        throw format_error("header: 'dims' must be an array");
    const auto& d = header["dims"];
    if (d.size() < lo || d.size() > hi) throw format_error("header: 'dims' has wrong rank");
    std::vector<std::uint64_t> out;
    for (const auto& e : d) {
        if (!e.is_number_unsigned() || e.get<std::uint64_t>() == 0)
            throw format_error("header: 'dims' entries must be positive integers");
        out.push_back(e.get<std::uint64_t>());
    }
    return out;
}

void read_payload(std::istream& is, double* xs, std::size_t n,
                  const std::filesystem::path& path) {
    const std::size_t got = read_f64_le(is, xs, n);
    if (got != n)
        throw size_mismatch_error("payload in " + path.string() + ": expected " +
                                  std::to_string(n) + " values, got " + std::to_string(got));
    check_no_trailing(is, path);
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

} // namespace

void write_volume(const Volume3D& vol, const std::filesystem::path& path) {
    vol.validate();
    auto os = open_out(path);
    os << kVolumeMagic;
    json header;
    header["dims"] = {vol.dims[0], vol.dims[1], vol.dims[2]};
    header["voxel_size_mm"] = vol.voxel_size_mm;
    os << header.dump() << '\n';
    write_f64_le(os, vol.data.data(), vol.data.size());
    if (!os) throw io_error("write failed: " + path.string());
}

void write_volume(const Volume4D& vol, const std::filesystem::path& path) {
    vol.validate();
    auto os = open_out(path);
    os << kVolumeMagic;
    json header;
    header["dims"] = {vol.dims[0], vol.dims[1], vol.dims[2], vol.n_frames};
    header["voxel_size_mm"] = vol.voxel_size_mm;
    header["tr_seconds"] = vol.tr_seconds;
    os << header.dump() << '\n';
    write_f64_le(os, vol.data.data(), vol.data.size());
    if (!os) throw io_error("write failed: " + path.string());
}

AnyVolume read_volume(const std::filesystem::path& path) {
    auto is = open_in(path);
    expect_magic(is, kVolumeMagic, path);
    const json header = read_header_line(is, path);
    const auto dims = parse_dims(header, 3, 4);
    const auto voxel_size = parse_voxel_size(header);

    if (dims.size() == 3) {
        Volume3D vol;
        vol.dims = {dims[0], dims[1], dims[2]};
        vol.voxel_size_mm = voxel_size;
        vol.data.resize(vol.n_voxels());
        read_payload(is, vol.data.data(), vol.data.size(), path);
        vol.validate();
        return vol;
    }
    Volume4D vol;
    vol.dims = {dims[0], dims[1], dims[2]};
    vol.n_frames = dims[3];
    vol.voxel_size_mm = voxel_size;
    if (!header.contains("tr_seconds") || !header["tr_seconds"].is_number())
        throw format_error("volume header: 4D volume requires numeric 'tr_seconds'");
    vol.tr_seconds = header["tr_seconds"].get<double>();
    vol.data.resize(vol.n_voxels() * vol.n_frames);
    read_payload(is, vol.data.data(), vol.data.size(), path);
    vol.validate();
    return vol;
}

Volume3D read_volume3d(const std::filesystem::path& path) {
    auto any = read_volume(path);
    if (auto* v = std::get_if<Volume3D>(&any)) return std::move(*v);
    throw format_error("expected a 3D volume in " + path.string());
}

Volume4D read_volume4d(const std::filesystem::path& path) {
    auto any = read_volume(path);
    if (auto* v = std::get_if<Volume4D>(&any)) return std::move(*v);
    throw format_error("expected a 4D volume in " + path.string());
}

void write_odf_field(const ODFField& field, const std::filesystem::path& path) {
    auto os = open_out(path);
    os << kOdfMagic;
    json header;
    header["dims"] = {field.dims()[0], field.dims()[1], field.dims()[2]};
    header["n_dirs"] = field.n_dirs();
    header["n_voxels"] = field.n_voxels();
    json dirs = json::array();
    for (const auto& d : field.directions()) dirs.push_back(vec3_to_json(d));
    header["directions"] = std::move(dirs);
    os << header.dump() << '\n';
    for (std::size_t i = 0; i < field.n_voxels(); ++i) {
        write_u64_le(os, field.voxel_indices()[i]);
        write_f64_le(os, field.values().data() + i * field.n_dirs(), field.n_dirs());
    }
    if (!os) throw io_error("write failed: " + path.string());
}

ODFField read_odf_field(const std::filesystem::path& path) {
    auto is = open_in(path);
    expect_magic(is, kOdfMagic, path);
    const json header = read_header_line(is, path);
    const auto dims = parse_dims(header, 3, 3);

    if (!header.contains("n_dirs") || !header["n_dirs"].is_number_unsigned())
        throw format_error("ODF header: 'n_dirs' must be a positive integer");
    if (!header.contains("n_voxels") || !header["n_voxels"].is_number_unsigned())
        throw format_error("ODF header: 'n_voxels' must be an unsigned integer");
    const auto n_dirs = header["n_dirs"].get<std::size_t>();
    const auto n_voxels = header["n_voxels"].get<std::size_t>();

    if (!header.contains("directions") || !header["directions"].is_array() ||
        header["directions"].size() != n_dirs)
        throw format_error("ODF header: 'directions' must be an array of n_dirs entries");
    std::vector<Vec3> directions;
    directions.reserve(n_dirs);
    for (const auto& e : header["directions"]) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number() || !e[1].is_number() ||
            !e[2].is_number())
            throw format_error("ODF header: 'directions' entries must be [x,y,z] numbers");
        directions.push_back({e[0].get<double>(), e[1].get<double>(), e[2].get<double>()});
    }

    std::vector<std::uint64_t> voxel_indices(n_voxels);
    std::vector<double> values(n_voxels * n_dirs);
    for (std::size_t i = 0; i < n_voxels; ++i) {
        if (!read_u64_le(is, voxel_indices[i]))
            throw size_mismatch_error("ODF payload truncated at record " + std::to_string(i) +
                                      " in " + path.string());
        if (read_f64_le(is, values.data() + i * n_dirs, n_dirs) != n_dirs)
            throw size_mismatch_error("ODF payload truncated at record " + std::to_string(i) +
                                      " in " + path.string());
    }
    check_no_trailing(is, path);
    return ODFField({dims[0], dims[1], dims[2]}, std::move(directions), std::move(voxel_indices),
                    std::move(values));
}

void write_streamlines(const StreamlineSet& set, const std::filesystem::path& path) {
    set.validate();
    json doc;
    json lines = json::array();
    for (const auto& line : set.streamlines) {
        json pts = json::array();
        for (const auto& p : line) pts.push_back(vec3_to_json(p));
        lines.push_back(std::move(pts));
    }
    doc["streamlines"] = std::move(lines);
    auto os = open_out(path);
    os << doc.dump() << '\n';
    if (!os) throw io_error("write failed: " + path.string());
}

StreamlineSet read_streamlines(const std::filesystem::path& path) {
    auto is = open_in(path);
    json doc = json::parse(is, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("streamlines") ||
        !doc["streamlines"].is_array())
        throw format_error("streamline file must be a JSON object with a 'streamlines' array: " +
                           path.string());
    StreamlineSet set;
    for (const auto& line : doc["streamlines"]) {
        if (!line.is_array())
            throw format_error("streamline entries must be arrays of points: " + path.string());
        Streamline poly;
        for (const auto& p : line) {
            if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
                !p[2].is_number())
                throw format_error("streamline points must be [x,y,z] numbers: " + path.string());
            poly.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
        }
        set.streamlines.push_back(std::move(poly));
    }
    set.validate();
    return set;
}

std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::uint64_t h = 0xCBF29CE484222325ull;
    char buf[1 << 16];
    while (is.read(buf, sizeof(buf)) || is.gcount() > 0) {
        const auto n = static_cast<std::size_t>(is.gcount());
        for (std::size_t i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ull;
        }
        if (n < sizeof(buf)) break;
    }
    return h;
}

} // namespace wmgf
