#pragma once

#include <charconv>
#include <string>
#include <vector>

#include <json.hpp>

#include "lineart/config.hpp"
#include "lineart/metrics.hpp"

namespace lineart {

/// Shortest decimal form that round-trips.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

inline nlohmann::json to_json(const MetricReport& r) {
    nlohmann::json j{{"id", r.id},
                     {"ssim", r.ssim},
                     {"psnr_db", r.psnr_db},
                     {"psnr_capped", r.psnr_capped},
                     {"chamfer", r.chamfer},
                     {"glcm_distance", r.glcm_distance},
                     {"ch_loss", r.ch_loss},
                     {"appearance_resampled", r.appearance_resampled},
                     {"parameters", to_json(r.parameters)}};
    j["external"] = {{"fid", r.fid ? nlohmann::json(*r.fid) : nlohmann::json(nullptr)},
                     {"lpips", r.lpips ? nlohmann::json(*r.lpips) : nlohmann::json(nullptr)},
                     {"clip_i", r.clip_i ? nlohmann::json(*r.clip_i) : nlohmann::json(nullptr)}};
    return j;
}

inline std::vector<std::string> csv_header(const MetricParams& p) {
    std::vector<std::string> cols{"id", "ssim", "psnr_db", "chamfer", "glcm_distance", "ch_loss"};
    const nlohmann::json params = to_json(p);
    for (const auto& [k, v] : params.items()) cols.push_back(k);
    return cols;
}

inline std::vector<std::string> csv_row(const MetricReport& r) {
    std::vector<std::string> row{r.id,
                                 format_double(r.ssim),
                                 format_double(r.psnr_db),
                                 format_double(r.chamfer),
                                 format_double(r.glcm_distance),
                                 format_double(r.ch_loss)};
    const nlohmann::json params = to_json(r.parameters);
    for (const auto& [k, v] : params.items()) {
        if (v.is_string()) {
            row.push_back(v.get<std::string>());
        } else if (v.is_array()) {
            std::string s;
            for (const auto& o : v) s += (s.empty() ? "" : ";") + o.at(0).dump() + ":" + o.at(1).dump();
            row.push_back(s);
        } else if (v.is_number_float()) {
            row.push_back(format_double(v.get<double>()));
        } else {
            row.push_back(v.dump());
        }
    }
    return row;
}

inline std::string join_csv(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        const bool quote = cells[i].find_first_of(",\"\n") != std::string::npos;
        if (!quote) {
            out += cells[i];
            continue;
        }
        out += '"';
        for (char c : cells[i]) out += c == '"' ? std::string("\"\"") : std::string(1, c);
        out += '"';
    }
    return out;
}

}  // namespace lineart
