#pragma once

#include <vector>

#include "wmgf/errors.hpp"
#include "wmgf/geometry.hpp"

namespace wmgf {

/// Polyline in mm coordinates; at least two points, consecutive points distinct.
using Streamline = std::vector<Vec3>;

struct StreamlineSet {
    std::vector<Streamline> streamlines;

    std::size_t size() const { return streamlines.size(); }

    void validate() const {
        for (const auto& line : streamlines) {
            if (line.size() < 2)
                throw format_error("StreamlineSet: streamline with fewer than 2 points");
            for (const auto& p : line)
                if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
                    throw format_error("StreamlineSet: non-finite point");
            for (std::size_t i = 1; i < line.size(); ++i)
                if (line[i] == line[i - 1])
                    throw format_error("StreamlineSet: consecutive duplicate points");
        }
    }

    friend bool operator==(const StreamlineSet&, const StreamlineSet&) = default;
};

} // namespace wmgf
