#pragma once

// Reference implementations written independently of the library, used only
// to check it.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <iterator>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "panokit/curator/clip_record.hpp"
#include "panokit/decode_pad.hpp"
#include "panokit/tensor.hpp"

namespace oracle {

/// Convolution with the width axis treated as periodic and the height axis
/// zero-padded, then nearest-neighbour upsampling. Taps are visited in the
/// same order as the library decoder so results can be compared bitwise.
inline panokit::Tensor circular_conv_decode(const panokit::Tensor& z, const panokit::ConvKernel& k,
                                            std::size_t u) {
    const long H = static_cast<long>(z.height()), W = static_cast<long>(z.width());
    const long hr = static_cast<long>(k.half_rows()), hc = static_cast<long>(k.half_cols());
    panokit::Tensor out({z.channels(), z.frames(), z.height() * u, z.width() * u});
    for (std::size_t c = 0; c < z.channels(); ++c)
        for (std::size_t f = 0; f < z.frames(); ++f)
            for (long y = 0; y < H; ++y)
                for (long x = 0; x < W; ++x) {
                    double acc = 0.0;
                    for (long i = -hr; i <= hr; ++i) {
                        if (y + i < 0 || y + i >= H) continue;
                        for (long j = -hc; j <= hc; ++j) {
                            const long xx = ((x + j) % W + W) % W;
                            acc += k(static_cast<std::size_t>(i + hr), static_cast<std::size_t>(j + hc)) *
                                   z(c, f, static_cast<std::size_t>(y + i), static_cast<std::size_t>(xx));
                        }
                    }
                    for (std::size_t a = 0; a < u; ++a)
                        for (std::size_t b = 0; b < u; ++b)
                            out(c, f, static_cast<std::size_t>(y) * u + a, static_cast<std::size_t>(x) * u + b) = acc;
                }
    return out;
}

/// Four-neighbour evaluation of sgn(BI(P)) * sqrt(BI(P^2)) on a single plane.
inline double naive_vp_interp(const panokit::Tensor& t, std::size_t c, double x, double y) {
    const long W = static_cast<long>(t.width()), H = static_cast<long>(t.height());
    const double yc = std::min(std::max(y, 0.0), static_cast<double>(H - 1));
    const long x0 = static_cast<long>(std::floor(x));
    const long y0 = static_cast<long>(std::floor(yc));
    const double ax = x - static_cast<double>(x0), ay = yc - static_cast<double>(y0);
    double lin = 0.0, sq = 0.0;
    const long xs[2] = {x0, x0 + 1};
    const long ys[2] = {y0, std::min(y0 + 1, H - 1)};
    const double wx[2] = {1.0 - ax, ax}, wy[2] = {1.0 - ay, ay};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const long xx = ((xs[b] % W) + W) % W;
            const double p = t(c, 0, static_cast<std::size_t>(ys[a]), static_cast<std::size_t>(xx));
            lin += wy[a] * wx[b] * p;
            sq += wy[a] * wx[b] * p * p;
        }
    const double sign = lin > 0 ? 1.0 : (lin < 0 ? -1.0 : 0.0);
    return sign * std::sqrt(sq);
}

// ---------------------------------------------------------------------------
// Curator reference filter
// ---------------------------------------------------------------------------

inline std::set<std::string> trigram_set(const std::string& caption) {
    std::vector<std::string> words;
    std::string w;
    for (char ch : caption + " ") {
        const auto u = static_cast<unsigned char>(ch);
        if (std::isalnum(u) || u >= 0x80) {
            w += static_cast<char>(std::tolower(u));
        } else if (!w.empty()) {
            words.push_back(w);
            w.clear();
        }
    }
    std::set<std::string> grams;
    if (words.size() < 3) {
        if (!words.empty()) {
            std::string all = words[0];
            for (std::size_t i = 1; i < words.size(); ++i) all += " " + words[i];
            grams.insert(all);
        }
        return grams;
    }
    for (std::size_t i = 0; i + 3 <= words.size(); ++i) grams.insert(words[i] + " " + words[i + 1] + " " + words[i + 2]);
    return grams;
}

inline double similarity(const std::string& a, const std::string& b) {
    const auto sa = trigram_set(a), sb = trigram_set(b);
    if (sa.empty() && sb.empty()) return 1.0;
    std::vector<std::string> inter, uni;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(inter));
    std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(uni));
    return static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

struct StageCounts {
    std::vector<std::size_t> after;  // survivors after views, panorama, motion, aesthetic, dedup, balance
    std::vector<std::string> kept_ids;
};

inline StageCounts reference_filter(const std::vector<panokit::curator::ClipRecord>& in, double dedup_threshold,
                                    std::size_t cap) {
    using Rec = panokit::curator::ClipRecord;
    StageCounts out;
    std::vector<Rec> cur;
    for (const Rec& r : in)
        if (r.view_count >= 1000) cur.push_back(r);
    out.after.push_back(cur.size());
    std::erase_if(cur, [](const Rec& r) { return !r.is_panorama; });
    out.after.push_back(cur.size());
    std::erase_if(cur, [](const Rec& r) { return !r.motion_score.has_value() || !(*r.motion_score > 0.4); });
    out.after.push_back(cur.size());
    std::erase_if(cur, [](const Rec& r) { return !r.aesthetic_score.has_value() || *r.aesthetic_score < 3.0; });
    out.after.push_back(cur.size());

    std::vector<Rec> unique;
    for (const Rec& r : cur) {
        bool dup = false;
        for (const Rec& k : unique)
            if (similarity(r.caption, k.caption) >= dedup_threshold) dup = true;
        if (!dup) unique.push_back(r);
    }
    cur = unique;
    out.after.push_back(cur.size());

    std::map<std::string, std::vector<Rec>> groups;
    for (const Rec& r : cur) groups[r.poi_categories.empty() ? "" : r.poi_categories[0]].push_back(r);
    std::set<std::string> chosen;
    for (auto& [cat, rs] : groups) {
        std::sort(rs.begin(), rs.end(), [](const Rec& a, const Rec& b) {
            return *a.aesthetic_score != *b.aesthetic_score ? *a.aesthetic_score > *b.aesthetic_score
                                                            : a.clip_id < b.clip_id;
        });
        for (std::size_t i = 0; i < rs.size() && i < cap; ++i) chosen.insert(rs[i].clip_id);
    }
    std::erase_if(cur, [&](const Rec& r) { return !chosen.count(r.clip_id); });
    out.after.push_back(cur.size());
    for (const Rec& r : cur) out.kept_ids.push_back(r.clip_id);
    return out;
}

/// Deterministic synthetic record set exercising every filter stage.
inline std::vector<panokit::curator::ClipRecord> synthetic_records(std::size_t n, std::uint32_t seed) {
    std::uint64_t state = seed * 0x9E3779B97F4A7C15ull + 1;
    auto next = [&]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    };
    auto unit = [&]() { return static_cast<double>(next() >> 11) * 0x1.0p-53; };
    static const std::vector<std::string> cats = {"beach", "mountain", "city", "forest", "stadium", "museum"};
    static const std::vector<std::string> words = {"a",      "wide",   "view",  "of",     "the",   "sunny",
                                                   "coast",  "with",   "waves", "people", "walking", "along",
                                                   "snowy",  "peak",   "under", "blue",   "sky",   "busy",
                                                   "street", "at",     "night", "green",  "trees", "crowd"};
    std::vector<panokit::curator::ClipRecord> out;
    std::vector<std::string> previous;
    for (std::size_t i = 0; i < n; ++i) {
        panokit::curator::ClipRecord r;
        char id[32];
        std::snprintf(id, sizeof(id), "clip_%05zu", i);
        r.clip_id = id;
        r.source_video = "video_" + std::to_string(i / 7);
        r.start_frame = static_cast<std::int64_t>(i % 7) * 300;
        r.end_frame = r.start_frame + 300;
        if (!previous.empty() && unit() < 0.2) {
            r.caption = previous[next() % previous.size()];  // exact duplicate
        } else {
            const std::size_t len = 4 + next() % 8;
            for (std::size_t k = 0; k < len; ++k) r.caption += (k ? " " : "") + words[next() % words.size()];
        }
        previous.push_back(r.caption);
        const double pc = unit();
        // The first category dominates so the cap binds.
        const std::size_t primary = pc < 0.85 ? 0 : 1 + next() % (cats.size() - 1);
        if (unit() > 0.03) {
            r.poi_categories.push_back(cats[primary]);
            if (unit() < 0.5) r.poi_categories.push_back(cats[next() % cats.size()]);
        }
        r.is_panorama = unit() < 0.9;
        r.view_count = static_cast<std::int64_t>(unit() * 12000.0);
        if (unit() < 0.05) r.view_count = 999 + static_cast<std::int64_t>(next() % 3);
        if (unit() > 0.04) r.motion_score = std::round(unit() * 100.0) / 100.0;  // lands on 0.4 exactly sometimes
        if (unit() > 0.04) r.aesthetic_score = 1.0 + std::round(std::sqrt(unit()) * 16.0) / 4.0;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace oracle
