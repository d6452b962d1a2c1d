#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace panokit::curator {

/// Metadata for one dataset clip. Caption, POI list, panorama flag and
/// aesthetic score are produced upstream and consumed as-is.
struct ClipRecord {
    std::string clip_id;
    std::string source_video;
    std::int64_t start_frame = 0;
    std::int64_t end_frame = 1;
    std::string caption;
    std::vector<std::string> poi_categories;  // most important first
    bool is_panorama = false;
    std::int64_t view_count = 0;
    std::optional<double> motion_score;     // [0, 1]
    std::optional<double> aesthetic_score;  // [1, 5]

    /// First POI entry; records without one share the empty category.
    [[nodiscard]] const std::string& primary_category() const {
        static const std::string none;
        return poi_categories.empty() ? none : poi_categories.front();
    }

    friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

}  // namespace panokit::curator
