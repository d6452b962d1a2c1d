#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "panokit/curator/clip_record.hpp"
#include "panokit/error.hpp"

namespace panokit::curator {

// ---------------------------------------------------------------------------
// Caption similarity
// ---------------------------------------------------------------------------

/// Lower-cased alphanumeric tokens; bytes >= 0x80 count as token characters.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char ch : text) {
        if (std::isalnum(ch) || ch >= 0x80) {
            cur.push_back(static_cast<char>(std::tolower(ch)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

/// Contiguous token n-grams; shorter captions contribute one shingle of all their tokens.
inline std::set<std::string> shingles(const std::string& caption, std::size_t n = 3) {
    const auto tokens = tokenize(caption);
    std::set<std::string> out;
    if (tokens.empty()) return out;
    const std::size_t span = std::min(n, tokens.size());
    for (std::size_t i = 0; i + span <= tokens.size(); ++i) {
        std::string s = tokens[i];
        for (std::size_t j = 1; j < span; ++j) s += ' ' + tokens[i + j];
        out.insert(std::move(s));
    }
    return out;
}

/// |A & B| / |A | B|; two empty sets are identical (1.0).
inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& s : a) inter += b.contains(s);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

inline double caption_similarity(const std::string& a, const std::string& b) {
    return jaccard(shingles(a), shingles(b));
}

// ---------------------------------------------------------------------------
// Stages
// ---------------------------------------------------------------------------

struct Rejected {
    ClipRecord record;
    std::string stage;
    std::string reason;
};

struct StageAudit {
    std::string stage;
    std::size_t input = 0;
    std::size_t dropped = 0;
    std::size_t output = 0;
};

/// Greedy pass in input order: a record is dropped when its caption's
/// shingle similarity to any already-retained caption reaches the threshold.
inline std::vector<ClipRecord> dedup_by_caption(const std::vector<ClipRecord>& records,
                                                double similarity_threshold,
                                                std::vector<Rejected>* rejects = nullptr) {
    std::vector<ClipRecord> kept;
    std::vector<std::set<std::string>> kept_shingles;
    for (const auto& r : records) {
        const auto sh = shingles(r.caption);
        const auto dup = std::ranges::find_if(kept_shingles, [&](const auto& k) {
            return jaccard(sh, k) >= similarity_threshold;
        });
        if (dup != kept_shingles.end()) {
            if (rejects) rejects->push_back({r, "dedup", "duplicate_caption"});
            continue;
        }
        kept.push_back(r);
        kept_shingles.push_back(sh);
    }
    return kept;
}

/// Keeps at most `cap` records per primary POI category, choosing the highest
/// aesthetic scores (ties by clip_id). Output keeps input order.
inline std::vector<ClipRecord> balance_categories(const std::vector<ClipRecord>& records,
                                                  std::size_t cap = 200,
                                                  std::vector<Rejected>* rejects = nullptr) {
    std::map<std::string, std::vector<std::size_t>> by_category;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].aesthetic_score)
            throw InvalidArgument("balance_categories: record '" + records[i].clip_id +
                                  "' has no aesthetic score");
        by_category[records[i].primary_category()].push_back(i);
    }
    std::vector<bool> keep(records.size(), false);
    for (auto& [category, idx] : by_category) {
        std::ranges::sort(idx, [&](std::size_t a, std::size_t b) {
            const double sa = *records[a].aesthetic_score, sb = *records[b].aesthetic_score;
            if (sa != sb) return sa > sb;
            return records[a].clip_id < records[b].clip_id;
        });
        for (std::size_t k = 0; k < std::min(cap, idx.size()); ++k) keep[idx[k]] = true;
    }
    std::vector<ClipRecord> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (keep[i])
            out.push_back(records[i]);
        else if (rejects)
            rejects->push_back({records[i], "balance", "category_cap"});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

struct FilterConfig {
    bool views_stage = true;
    std::int64_t min_views = 1000;        // keep view_count >= min_views
    bool panorama_stage = true;           // keep is_panorama
    bool motion_stage = true;
    double min_motion = 0.4;              // keep motion_score > min_motion
    bool aesthetic_stage = true;
    double min_aesthetic = 3.0;           // keep aesthetic_score >= min_aesthetic
    bool dedup_stage = true;
    double dedup_threshold = 0.9;         // drop at similarity >= threshold
    bool balance_stage = true;
    std::size_t category_cap = 200;

    void validate() const {
        detail::require(min_views >= 0, "min_views must be >= 0");
        detail::require(min_motion >= 0.0 && min_motion <= 1.0, "min_motion must be in [0, 1]");
        detail::require(min_aesthetic >= 1.0 && min_aesthetic <= 5.0, "min_aesthetic must be in [1, 5]");
        detail::require(dedup_threshold >= 0.0 && dedup_threshold <= 1.0,
                        "dedup_threshold must be in [0, 1]");
        detail::require(category_cap >= 1, "category_cap must be >= 1");
    }
};

struct FilterResult {
    std::vector<ClipRecord> kept;
    std::vector<Rejected> rejected;
    std::vector<StageAudit> audit;
};

/// Popularity, panorama flag, motion, aesthetic, caption dedup, category
/// balance, in that order. Every input record ends up in exactly one of
/// `kept` or `rejected`; a record lacking a score needed by an enabled stage
/// is rejected with a "missing_*" reason.
inline FilterResult filter_pipeline(const std::vector<ClipRecord>& records, const FilterConfig& cfg = {}) {
    cfg.validate();
    FilterResult res;
    std::vector<ClipRecord> cur = records;

    auto run_stage = [&](const std::string& name, auto&& verdict) {
        std::vector<ClipRecord> next;
        const std::size_t before = cur.size();
        for (auto& r : cur) {
            const std::string reason = verdict(r);
            if (reason.empty())
                next.push_back(std::move(r));
            else
                res.rejected.push_back({std::move(r), name, reason});
        }
        cur = std::move(next);
        res.audit.push_back({name, before, before - cur.size(), cur.size()});
    };

    if (cfg.views_stage)
        run_stage("views", [&](const ClipRecord& r) -> std::string {
            return r.view_count >= cfg.min_views ? "" : "views_below_min";
        });
    if (cfg.panorama_stage)
        run_stage("panorama", [](const ClipRecord& r) -> std::string {
            return r.is_panorama ? "" : "not_panorama";
        });
    if (cfg.motion_stage)
        run_stage("motion", [&](const ClipRecord& r) -> std::string {
            if (!r.motion_score) return "missing_motion_score";
            return *r.motion_score > cfg.min_motion ? "" : "motion_below_threshold";
        });
    if (cfg.aesthetic_stage)
        run_stage("aesthetic", [&](const ClipRecord& r) -> std::string {
            if (!r.aesthetic_score) return "missing_aesthetic_score";
            return *r.aesthetic_score >= cfg.min_aesthetic ? "" : "aesthetic_below_min";
        });
    if (cfg.dedup_stage) {
        const std::size_t before = cur.size();
        cur = dedup_by_caption(cur, cfg.dedup_threshold, &res.rejected);
        res.audit.push_back({"dedup", before, before - cur.size(), cur.size()});
    }
    if (cfg.balance_stage) {
        const std::size_t before = cur.size();
        // Balancing ranks by aesthetic score, so it needs one even when the
        // aesthetic threshold stage is disabled.
        std::vector<ClipRecord> scored;
        for (auto& r : cur) {
            if (r.aesthetic_score)
                scored.push_back(std::move(r));
            else
                res.rejected.push_back({std::move(r), "balance", "missing_aesthetic_score"});
        }
        cur = balance_categories(scored, cfg.category_cap, &res.rejected);
        res.audit.push_back({"balance", before, before - cur.size(), cur.size()});
    }
    res.kept = std::move(cur);
    return res;
}

}  // namespace panokit::curator
