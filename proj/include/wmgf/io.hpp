#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "wmgf/odf.hpp"
#include "wmgf/streamlines.hpp"
#include "wmgf/volume.hpp"

namespace wmgf {

// On-disk formats. All binary payloads are little-endian IEEE 754 f64 so
// files round-trip bit-exactly across implementations.
//
//   volume:      "WMGF-VOL1\n" + JSON header line + '\n' + f64 payload
//   ODF field:   "WMGF-ODF1\n" + JSON header line + '\n' +
//                per-voxel records of (u64 flat index, n_dirs f64 values)
//   streamlines: JSON document {"streamlines": [[[x,y,z], ...], ...]}

inline constexpr const char* kVolumeMagic = "WMGF-VOL1\n";
inline constexpr const char* kOdfMagic = "WMGF-ODF1\n";

using AnyVolume = std::variant<Volume3D, Volume4D>;

AnyVolume read_volume(const std::filesystem::path& path);
Volume3D read_volume3d(const std::filesystem::path& path);
Volume4D read_volume4d(const std::filesystem::path& path);

void write_volume(const Volume3D& vol, const std::filesystem::path& path);
void write_volume(const Volume4D& vol, const std::filesystem::path& path);

ODFField read_odf_field(const std::filesystem::path& path);
void write_odf_field(const ODFField& field, const std::filesystem::path& path);

StreamlineSet read_streamlines(const std::filesystem::path& path);
void write_streamlines(const StreamlineSet& set, const std::filesystem::path& path);

/// FNV-1a 64-bit over a file's bytes; used in provenance records.
std::uint64_t fnv1a_file(const std::filesystem::path& path);

} // namespace wmgf
