#pragma once

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lineart/digest.hpp"
#include "lineart/linefusion.hpp"
#include "lineart/png_io.hpp"
#include "lineart/raster.hpp"

namespace lineart {

enum class ScoreSource { external_file, builtin_proxy };

inline std::string to_string(ScoreSource s) {
    return s == ScoreSource::external_file ? "external_file" : "builtin_proxy";
}

inline ScoreSource parse_score_source(const std::string& s) {
    if (s == "external_file") return ScoreSource::external_file;
    if (s == "builtin_proxy") return ScoreSource::builtin_proxy;
    fail(ErrorKind::validation, "unknown score source '" + s + "'");
}

struct ComplexityScore {
    double value = 0.0;
    ScoreSource source = ScoreSource::external_file;
    friend bool operator==(const ComplexityScore&, const ComplexityScore&) = default;
};

// ---------------------------------------------------------------- proxy

inline constexpr double kEdgeGradientThreshold = 0.1;

/// Fraction of pixels whose forward-difference gradient magnitude exceeds 0.1.
inline double edge_density(const GrayImage& img) {
    std::size_t edges = 0;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
            const double gx = x + 1 < img.width() ? img(x + 1, y) - img(x, y) : 0.0;
            const double gy = y + 1 < img.height() ? img(x, y + 1) - img(x, y) : 0.0;
            edges += std::sqrt(gx * gx + gy * gy) > kEdgeGradientThreshold;
        }
    return static_cast<double>(edges) / static_cast<double>(img.size());
}

inline std::size_t deflated_size(const std::vector<std::uint8_t>& bytes) {
    uLongf len = compressBound(static_cast<uLong>(bytes.size()));
    std::vector<Bytef> out(len);
    require(compress2(out.data(), &len, bytes.data(), static_cast<uLong>(bytes.size()), 9) == Z_OK,
            ErrorKind::input, "zlib compression failed");
    return len;
}

/// Incompressibility of the 8-bit raster, min-max scaled between a constant
/// buffer of the same length (0) and no compression at all (1).
inline double incompressibility(const GrayImage& img) {
    std::vector<std::uint8_t> bytes(img.size());
    std::transform(img.pixels().begin(), img.pixels().end(), bytes.begin(), to_byte);
    std::array<std::size_t, 256> hist{};
    for (auto b : bytes) ++hist[b];
    const auto mode = static_cast<std::uint8_t>(std::max_element(hist.begin(), hist.end()) - hist.begin());
    const double raw = static_cast<double>(bytes.size());
    const double floor_ratio =
        static_cast<double>(deflated_size(std::vector<std::uint8_t>(bytes.size(), mode))) / raw;
    const double ratio = static_cast<double>(deflated_size(bytes)) / raw;
    if (ratio <= floor_ratio) return 0.0;
    return std::clamp((ratio - floor_ratio) / (1.0 - floor_ratio), 0.0, 1.0);
}

/// Stand-in complexity score for drawings without an external score. Not a
/// calibrated replacement for a learned complexity model.
inline ComplexityScore complexity_proxy(const GrayImage& img) {
    const double v = 0.5 * std::clamp(edge_density(img), 0.0, 1.0) +
                     0.5 * std::clamp(incompressibility(img), 0.0, 1.0);
    return {v, ScoreSource::builtin_proxy};
}

// ---------------------------------------------------------------- scores & rules

struct ScoredItem {
    std::string id;
    ComplexityScore score;
};

using ScoreTable = std::vector<ScoredItem>;

inline double parse_double(std::string s, const std::string& where) {
    s.erase(0, s.find_first_not_of(" \t\r"));
    s.erase(s.find_last_not_of(" \t\r") + 1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    require(ec == std::errc{} && ptr == s.data() + s.size() && !s.empty(), ErrorKind::input,
            where + ": '" + s + "' is not a number");
    return v;
}

/// CSV `id,score`; an optional `id,score` header line is skipped.
inline ScoreTable parse_scores(std::istream& in, const std::string& name = "scores") {
    ScoreTable table;
    std::map<std::string, bool> seen;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (row == 1 && line == "id,score") continue;
        const std::string where = name + " row " + std::to_string(row);
        const auto comma = line.find(',');
        require(comma != std::string::npos && line.find(',', comma + 1) == std::string::npos,
                ErrorKind::input, where + ": expected 'id,score'");
        std::string id = line.substr(0, comma);
        require(!id.empty(), ErrorKind::input, where + ": empty id");
        const double v = parse_double(line.substr(comma + 1), where);
        require(v >= 0.0 && v <= 1.0, ErrorKind::input, where + ": score outside [0,1]");
        require(!seen[id], ErrorKind::input, where + ": duplicate id '" + id + "'");
        seen[id] = true;
        table.push_back({std::move(id), {v, ScoreSource::external_file}});
    }
    return table;
}

inline ScoreTable load_scores(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::input, path.string() + ": cannot open");
    return parse_scores(in, path.string());
}

struct CurationRule {
    std::string dataset_name;
    double lo = 0.0;
    double hi = 1.0;
    friend bool operator==(const CurationRule&, const CurationRule&) = default;
};

inline void validate(const CurationRule& r) {
    require(r.lo >= 0.0 && r.lo <= r.hi && r.hi <= 1.0, ErrorKind::parameter,
            "curation rule needs 0 <= lo <= hi <= 1");
}

/// Published complexity intervals of the four source corpora.
inline const std::vector<CurationRule>& named_rules() {
    static const std::vector<CurationRule> rules{
        {"bronze", 0.2576, 0.2903},
        {"differsketching", 0.0461, 0.2165},
        {"imagenet-sketch", 0.2500, 0.2650},
        {"deeppatent", 0.2715, 0.2790},
    };
    return rules;
}

/// A named rule, or an explicit "lo,hi" pair.
inline CurationRule parse_rule(const std::string& spec) {
    std::string key = spec;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto& r : named_rules())
        if (r.dataset_name == key) return r;
    const auto comma = spec.find(',');
    require(comma != std::string::npos, ErrorKind::parameter, "unknown curation rule '" + spec + "'");
    CurationRule r{"custom", parse_double(spec.substr(0, comma), "rule lo"),
                   parse_double(spec.substr(comma + 1), "rule hi")};
    validate(r);
    return r;
}

struct Partition {
    std::vector<std::string> accepted;
    std::vector<std::string> rejected_low;
    std::vector<std::string> rejected_high;
};

/// Closed interval [lo, hi]; input order is preserved inside each list.
inline Partition filter_by_threshold(const ScoreTable& scores, const CurationRule& rule) {
    validate(rule);
    Partition p;
    for (const auto& s : scores) {
        if (s.score.value < rule.lo) p.rejected_low.push_back(s.id);
        else if (s.score.value > rule.hi) p.rejected_high.push_back(s.id);
        else p.accepted.push_back(s.id);
    }
    return p;
}

// ---------------------------------------------------------------- preprocessing

struct PreprocessResult {
    BinaryMask source_mask;
    Box crop_box;       // in source coordinates
    GrayImage image;    // target_size x target_size, background whited out
    BinaryMask mask;    // mask carried through the same crop/letterbox/resize
};

inline constexpr double kCropMarginFraction = 0.05;

inline Box expand_box(const Box& b, int width, int height, double fraction) {
    const int m = static_cast<int>(std::ceil(fraction * std::max(b.w, b.h)));
    const int x0 = std::max(0, b.x - m), y0 = std::max(0, b.y - m);
    const int x1 = std::min(width, b.x + b.w + m), y1 = std::min(height, b.y + b.h + m);
    return {x0, y0, x1 - x0, y1 - y0};
}

inline GrayImage letterbox(const GrayImage& img, double fill) {
    const int side = std::max(img.width(), img.height());
    GrayImage out(side, side, fill);
    const int ox = (side - img.width()) / 2, oy = (side - img.height()) / 2;
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) out(ox + x, oy + y) = img(x, y);
    return out;
}

/// Mask extraction, background whitening, margin crop, square letterbox, resize.
inline PreprocessResult preprocess_image(const GrayImage& drawing, int target_size = 512,
                                         double ink_threshold = 0.5) {
    require(target_size >= 1, ErrorKind::parameter, "target size must be >= 1");
    PreprocessResult r;
    r.source_mask = extract_mask(drawing, ink_threshold);
    GrayImage masked = drawing;
    for (std::size_t i = 0; i < masked.size(); ++i)
        if (!r.source_mask.pixels()[i]) masked.pixels()[i] = 1.0;
    r.crop_box = expand_box(bounding_box(r.source_mask), drawing.width(), drawing.height(),
                            kCropMarginFraction);
    r.image = resize_bilinear(letterbox(crop(masked, r.crop_box), 1.0), target_size, target_size);
    const GrayImage m = resize_bilinear(letterbox(to_gray(crop(r.source_mask, r.crop_box)), 0.0),
                                        target_size, target_size);
    r.mask = threshold_above(m, 0.5);
    return r;
}

enum class EntryStatus { accepted, rejected_low, rejected_high, failed };

inline std::string to_string(EntryStatus s) {
    switch (s) {
        case EntryStatus::accepted: return "accepted";
        case EntryStatus::rejected_low: return "rejected_low";
        case EntryStatus::rejected_high: return "rejected_high";
        case EntryStatus::failed: return "failed";
    }
    return {};
}

inline EntryStatus parse_entry_status(const std::string& s) {
    if (s == "accepted") return EntryStatus::accepted;
    if (s == "rejected_low") return EntryStatus::rejected_low;
    if (s == "rejected_high") return EntryStatus::rejected_high;
    if (s == "failed") return EntryStatus::failed;
    fail(ErrorKind::validation, "unknown manifest status '" + s + "'");
}

struct ManifestEntry {
    std::string source_path;
    std::string id;
    std::optional<ComplexityScore> score;
    EntryStatus status = EntryStatus::failed;
    std::optional<double> excluded_by;  // the violated bound for rejected entries
    std::string reason;                 // failures only
    std::string mask_path;
    std::optional<Box> crop_box;
    std::string output_path;
    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Reads, preprocesses and writes `<out_dir>/<id>.png` and `<id>_mask.png`.
/// Failures become a `failed` entry instead of propagating.
inline ManifestEntry preprocess(const std::filesystem::path& source, const std::string& id,
                                const std::filesystem::path& out_dir, int target_size = 512,
                                double ink_threshold = 0.5) {
    ManifestEntry e;
    e.source_path = source.generic_string();
    e.id = id;
    try {
        const PreprocessResult r = preprocess_image(read_png_gray(source), target_size, ink_threshold);
        std::filesystem::create_directories(out_dir);
        const auto img_path = out_dir / (id + ".png");
        const auto mask_path = out_dir / (id + "_mask.png");
        write_png(img_path, r.image);
        write_png(mask_path, r.mask);
        e.status = EntryStatus::accepted;
        e.crop_box = r.crop_box;
        e.output_path = img_path.generic_string();
        e.mask_path = mask_path.generic_string();
    } catch (const Error& err) {
        e.status = EntryStatus::failed;
        e.reason = err.what();
    }
    return e;
}

// ---------------------------------------------------------------- manifest

inline nlohmann::json to_json(const ManifestEntry& e) {
    nlohmann::json j;
    j["source_path"] = e.source_path;
    j["id"] = e.id;
    j["status"] = to_string(e.status);
    if (e.score) j["score"] = {{"value", e.score->value}, {"source", to_string(e.score->source)}};
    else j["score"] = nullptr;
    if (e.excluded_by) j["excluded_by"] = *e.excluded_by;
    if (!e.reason.empty()) j["reason"] = e.reason;
    j["mask_path"] = e.mask_path;
    if (e.crop_box) j["crop_box"] = {e.crop_box->x, e.crop_box->y, e.crop_box->w, e.crop_box->h};
    else j["crop_box"] = nullptr;
    j["output_path"] = e.output_path;
    return j;
}

inline ManifestEntry manifest_entry_from_json(const nlohmann::json& j) {
    try {
        ManifestEntry e;
        e.source_path = j.at("source_path").get<std::string>();
        e.id = j.at("id").get<std::string>();
        e.status = parse_entry_status(j.at("status").get<std::string>());
        if (!j.at("score").is_null())
            e.score = ComplexityScore{j.at("score").at("value").get<double>(),
                                      parse_score_source(j.at("score").at("source").get<std::string>())};
        if (j.contains("excluded_by")) e.excluded_by = j.at("excluded_by").get<double>();
        if (j.contains("reason")) e.reason = j.at("reason").get<std::string>();
        e.mask_path = j.at("mask_path").get<std::string>();
        if (!j.at("crop_box").is_null()) {
            const auto& b = j.at("crop_box");
            e.crop_box = Box{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()};
        }
        e.output_path = j.at("output_path").get<std::string>();
        if (e.status == EntryStatus::accepted)
            require(!e.mask_path.empty() && e.crop_box && !e.output_path.empty(),
                    ErrorKind::validation, "accepted entry missing outputs");
        return e;
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorKind::validation, std::string("manifest entry: ") + ex.what());
    }
}

struct ManifestSummary {
    CurationRule rule;
    std::map<std::string, int> counts;
    std::string score_source;
};

/// JSON lines sorted by source_path, plus `summary.json` next to it.
inline ManifestSummary write_manifest(std::vector<ManifestEntry> entries,
                                      const std::filesystem::path& path, const CurationRule& rule,
                                      ScoreSource source) {
    std::stable_sort(entries.begin(), entries.end(),
                     [](const auto& a, const auto& b) { return a.source_path < b.source_path; });
    std::string text;
    ManifestSummary s{rule, {}, to_string(source)};
    for (auto st : {EntryStatus::accepted, EntryStatus::rejected_low, EntryStatus::rejected_high,
                    EntryStatus::failed})
        s.counts[to_string(st)] = 0;
    for (const auto& e : entries) {
        text += to_json(e).dump() + "\n";
        ++s.counts[to_string(e.status)];
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    write_file(path, text);
    nlohmann::json summary{{"rule", {{"name", rule.dataset_name}, {"lo", rule.lo}, {"hi", rule.hi}}},
                           {"counts", s.counts},
                           {"score_source", s.score_source},
                           {"inclusive_bounds", true},
                           {"total", entries.size()}};
    write_file(path.parent_path() / "summary.json", summary.dump(2) + "\n");
    return s;
}

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::vector<ManifestEntry> out;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        try {
            out.push_back(manifest_entry_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& ex) {
            fail(ErrorKind::validation, path.string() + " line " + std::to_string(row) + ": " + ex.what());
        }
    }
    return out;
}

}  // namespace lineart
