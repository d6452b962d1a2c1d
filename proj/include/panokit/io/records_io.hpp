#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "panokit/curator/clip_record.hpp"
#include "panokit/curator/pipeline.hpp"
#include "panokit/error.hpp"

namespace panokit::io {

using json = nlohmann::ordered_json;

inline json record_to_json(const curator::ClipRecord& r) {
    json j;
    j["clip_id"] = r.clip_id;
    j["source_video"] = r.source_video;
    j["start_frame"] = r.start_frame;
    j["end_frame"] = r.end_frame;
    j["caption"] = r.caption;
    j["poi_categories"] = r.poi_categories;
    j["is_panorama"] = r.is_panorama;
    j["view_count"] = r.view_count;
    j["motion_score"] = r.motion_score ? json(*r.motion_score) : json(nullptr);
    j["aesthetic_score"] = r.aesthetic_score ? json(*r.aesthetic_score) : json(nullptr);
    return j;
}

namespace detail {

inline std::optional<double> optional_score(const json& j, const char* key, double lo, double hi) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    const double v = j.at(key).get<double>();
    if (!(v >= lo && v <= hi))
        throw InvalidArgument(std::string(key) + " " + std::to_string(v) + " outside [" + std::to_string(lo) +
                              ", " + std::to_string(hi) + "]");
    return v;
}

}  // namespace detail

/// Parses one record. Missing or null scores become absent; other fields are required.
inline curator::ClipRecord record_from_json(const json& j) {
    curator::ClipRecord r;
    try {
        r.clip_id = j.at("clip_id").get<std::string>();
        r.source_video = j.at("source_video").get<std::string>();
        r.start_frame = j.at("start_frame").get<std::int64_t>();
        r.end_frame = j.at("end_frame").get<std::int64_t>();
        r.caption = j.at("caption").get<std::string>();
        r.poi_categories = j.at("poi_categories").get<std::vector<std::string>>();
        r.is_panorama = j.at("is_panorama").get<bool>();
        r.view_count = j.at("view_count").get<std::int64_t>();
    } catch (const json::exception& e) {
        throw CorruptFile(std::string("bad clip record: ") + e.what());
    }
    if (r.end_frame <= r.start_frame) throw CorruptFile("clip '" + r.clip_id + "': end_frame <= start_frame");
    try {
        r.motion_score = detail::optional_score(j, "motion_score", 0.0, 1.0);
        r.aesthetic_score = detail::optional_score(j, "aesthetic_score", 1.0, 5.0);
    } catch (const json::exception& e) {
        throw CorruptFile("clip '" + r.clip_id + "': " + e.what());
    } catch (const InvalidArgument& e) {
        throw CorruptFile("clip '" + r.clip_id + "': " + e.what());
    }
    return r;
}

/// One JSON object per line; blank lines are skipped.
inline std::vector<curator::ClipRecord> read_records(std::istream& in, const std::string& origin = "<stream>") {
    std::vector<curator::ClipRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw CorruptFile(origin + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const CorruptFile& e) {
            throw CorruptFile(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<curator::ClipRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return read_records(in, path.string());
}

inline std::string records_to_jsonl(const std::vector<curator::ClipRecord>& records) {
    std::string out;
    for (const auto& r : records) out += record_to_json(r).dump() + '\n';
    return out;
}

/// Rejected records carry the stage that dropped them and a `reason` field.
inline std::string rejects_to_jsonl(const std::vector<curator::Rejected>& rejects) {
    std::string out;
    for (const auto& rej : rejects) {
        json j = record_to_json(rej.record);
        j["stage"] = rej.stage;
        j["reason"] = rej.reason;
        out += j.dump() + '\n';
    }
    return out;
}

inline json audit_to_json(const std::vector<curator::StageAudit>& audit) {
    json stages = json::array();
    for (const auto& a : audit)
        stages.push_back({{"stage", a.stage}, {"input", a.input}, {"dropped", a.dropped}, {"output", a.output}});
    return stages;
}

}  // namespace panokit::io
