#pragma once

#include <stdexcept>
#include <string>

namespace wmgf {

/// Malformed on-disk data: bad magic, unparsable header, invalid field.
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

/// Payload length does not match the header declaration.
class size_mismatch_error : public format_error {
public:
    explicit size_mismatch_error(const std::string& what) : format_error(what) {}
};

/// Incompatible grid/vector dimensions between two objects.
class shape_error : public std::runtime_error {
public:
    explicit shape_error(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem-level failure (unreadable/unwritable path).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace wmgf
