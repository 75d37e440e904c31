#pragma once

// Internal little-endian stream helpers shared by the file-format code.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>

#include "wmgf/errors.hpp"

namespace wmgf::detail {

inline std::uint64_t bswap64(std::uint64_t v) {
    return ((v & 0x00000000000000FFull) << 56) | ((v & 0x000000000000FF00ull) << 40) |
           ((v & 0x0000000000FF0000ull) << 24) | ((v & 0x00000000FF000000ull) << 8) |
           ((v & 0x000000FF00000000ull) >> 8) | ((v & 0x0000FF0000000000ull) >> 24) |
           ((v & 0x00FF000000000000ull) >> 40) | ((v & 0xFF00000000000000ull) >> 56);
}

inline std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    return bswap64(v);
}

inline void write_u64_le(std::ostream& os, std::uint64_t v) {
    const std::uint64_t le = to_le(v);
    os.write(reinterpret_cast<const char*>(&le), sizeof(le));
}

inline bool read_u64_le(std::istream& is, std::uint64_t& v) {
    std::uint64_t raw;
    if (!is.read(reinterpret_cast<char*>(&raw), sizeof(raw))) return false;
    v = to_le(raw);
    return true;
}

inline void write_u64_le(std::ostream& os, const std::uint64_t* xs, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(xs), static_cast<std::streamsize>(n * 8));
    } else {
        for (std::size_t i = 0; i < n; ++i) write_u64_le(os, xs[i]);
    }
}

/// Returns the number of u64 values actually read (short on EOF).
inline std::size_t read_u64_le(std::istream& is, std::uint64_t* xs, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(xs), static_cast<std::streamsize>(n * 8));
        return static_cast<std::size_t>(is.gcount()) / 8;
    } else {
        std::size_t i = 0;
        for (; i < n && read_u64_le(is, xs[i]); ++i) {}
        return i;
    }
}

inline void write_f64_le(std::ostream& os, const double* xs, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(xs), static_cast<std::streamsize>(n * 8));
    } else {
        for (std::size_t i = 0; i < n; ++i) write_u64_le(os, std::bit_cast<std::uint64_t>(xs[i]));
    }
}

/// Returns the number of doubles actually read (short on EOF).
inline std::size_t read_f64_le(std::istream& is, double* xs, std::size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(xs), static_cast<std::streamsize>(n * 8));
        return static_cast<std::size_t>(is.gcount()) / 8;
    } else {
        std::size_t i = 0;
        std::uint64_t bits;
        for (; i < n && read_u64_le(is, bits); ++i) xs[i] = std::bit_cast<double>(bits);
        return i;
    }
}

inline std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw io_error("cannot open for writing: " + path.string());
    return os;
}

inline std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path.string());
    return is;
}

inline void expect_magic(std::istream& is, const char* magic, const std::filesystem::path& path) {
    const std::size_t len = std::strlen(magic);
    std::string got(len, '\0');
    is.read(got.data(), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(is.gcount()) != len || got != magic)
        throw format_error("bad magic in " + path.string() + ": expected " +
                           std::string(magic, len - 1));
}

inline void check_no_trailing(std::istream& is, const std::filesystem::path& path) {
    char extra;
    if (is.read(&extra, 1))
        throw size_mismatch_error("trailing bytes after payload in " + path.string());
}

} // namespace wmgf::detail
