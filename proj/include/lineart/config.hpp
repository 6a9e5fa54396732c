#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lineart/baselayer.hpp"
#include "lineart/digest.hpp"
#include "lineart/linefusion.hpp"
#include "lineart/metrics.hpp"
#include "lineart/morphology.hpp"
#include "lineart/texsynth.hpp"

namespace lineart {

inline constexpr const char* kConfigEnvVar = "LINEART_CONFIG";

struct LineFusionConfig {
    StructuringElement se = StructuringElement::square(1);
    double ink_threshold = 0.5;
    int haar_levels = 2;
    double keep_fraction = 0.10;
    FusionWeights weights;
};

struct ScheduleConfig {
    int steps = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;
};

struct BaseLayerConfig {
    RetinexParams retinex;
    double blend_factor = 0.5;
    LatentMapping latent_mapping;
    ScheduleConfig schedule;
};

struct TexSynthConfig {
    int patch_size = 64;
    int output_width = 512;
    int output_height = 512;
    SamplingMode mode = SamplingMode::with_replacement;
};

struct CurationConfig {
    int target_size = 512;
};

/// Every knob of the pipeline. Serialized in full (defaults expanded) into
/// each bundle's meta.json.
struct PipelineConfig {
    std::uint64_t seed = 0;
    LineFusionConfig linefusion;
    BaseLayerConfig baselayer;
    TexSynthConfig texsynth;
    MetricParams metrics;
    CurationConfig curation;
};

inline nlohmann::json to_json(const MetricParams& m) {
    nlohmann::json offsets = nlohmann::json::array();
    for (const auto& o : m.glcm.offsets) offsets.push_back({o.dx, o.dy});
    return {{"ssim_window", m.ssim.window},
            {"ssim_dynamic_range", m.ssim.dynamic_range},
            {"ssim_k1", m.ssim.k1},
            {"ssim_k2", m.ssim.k2},
            {"psnr_peak", m.psnr_peak},
            {"psnr_cap_db", m.psnr_cap_db},
            {"glcm_levels", m.glcm.levels},
            {"glcm_offsets", offsets},
            {"glcm_symmetric", m.glcm.symmetric},
            {"glcm_statistic", to_string(m.glcm_statistic)},
            {"ch_bins", m.ch_bins},
            {"ch_metric", "l1_total_variation"},
            {"edge_threshold", m.edge_threshold},
            {"edge_haar_levels", m.edge_haar_levels}};
}

inline nlohmann::json to_json(const PipelineConfig& c) {
    const auto& lf = c.linefusion;
    const auto& bl = c.baselayer;
    return {
        {"seed", c.seed},
        {"linefusion",
         {{"se_shape", to_string(lf.se.shape)},
          {"se_radius", lf.se.radius},
          {"ink_threshold", lf.ink_threshold},
          {"haar_levels", lf.haar_levels},
          {"keep_fraction", lf.keep_fraction},
          {"weights",
           {{"double", lf.weights.double_line},
            {"single", lf.weights.single_line},
            {"soft", lf.weights.soft_edge}}}}},
        {"baselayer",
         {{"retinex_scales", bl.retinex.scales},
          {"retinex_weights", bl.retinex.weights},
          {"retinex_epsilon", bl.retinex.epsilon},
          {"blend_factor", bl.blend_factor},
          {"latent_scale", bl.latent_mapping.scale},
          {"schedule",
           {{"steps", bl.schedule.steps},
            {"beta_start", bl.schedule.beta_start},
            {"beta_end", bl.schedule.beta_end}}}}},
        {"texsynth",
         {{"patch_size", c.texsynth.patch_size},
          {"output_width", c.texsynth.output_width},
          {"output_height", c.texsynth.output_height},
          {"mode", to_string(c.texsynth.mode)}}},
        {"metrics", to_json(c.metrics)},
        {"curation", {{"target_size", c.curation.target_size}}},
    };
}

namespace detail {

// Overlays the keys of `j` at `path`; keys absent from `known` are rejected.
class ConfigReader {
public:
    ConfigReader(const nlohmann::json& j, std::string path, std::set<std::string> known)
        : j_(j), path_(std::move(path)) {
        require(j.is_object(), ErrorKind::parameter, path_ + ": expected an object");
        for (const auto& [k, v] : j.items())
            require(known.count(k) > 0, ErrorKind::parameter,
                    "unknown config key '" + where(k) + "'");
    }

    template <class T>
    void get(const std::string& key, T& out) const {
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            fail(ErrorKind::parameter, "config key '" + where(key) + "' has the wrong type");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    const nlohmann::json& at(const std::string& key) const { return j_.at(key); }
    std::string where(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const nlohmann::json& j_;
    std::string path_;
};

}  // namespace detail

/// Validates every knob against its module contract.
inline void validate(const PipelineConfig& c) {
    const auto& lf = c.linefusion;
    require(lf.se.radius >= 1, ErrorKind::parameter, "linefusion.se_radius must be >= 1");
    require(lf.ink_threshold >= 0.0 && lf.ink_threshold <= 1.0, ErrorKind::parameter,
            "linefusion.ink_threshold must be in [0,1]");
    require(lf.haar_levels >= 1, ErrorKind::parameter, "linefusion.haar_levels must be >= 1");
    require(lf.keep_fraction > 0.0 && lf.keep_fraction <= 1.0, ErrorKind::parameter,
            "linefusion.keep_fraction must be in (0,1]");
    for (double w : {lf.weights.double_line, lf.weights.single_line, lf.weights.soft_edge})
        require(w >= 0.0 && w <= 1.0, ErrorKind::parameter, "linefusion.weights must be in [0,1]");
    validate(c.baselayer.retinex);
    require(c.baselayer.blend_factor >= 0.0 && c.baselayer.blend_factor <= 1.0,
            ErrorKind::parameter, "baselayer.blend_factor must be in [0,1]");
    require(c.baselayer.latent_mapping.scale > 0.0, ErrorKind::parameter,
            "baselayer.latent_scale must be > 0");
    build_schedule(c.baselayer.schedule.steps, c.baselayer.schedule.beta_start,
                   c.baselayer.schedule.beta_end);
    const auto& ts = c.texsynth;
    require(ts.patch_size >= 4, ErrorKind::parameter, "texsynth.patch_size must be >= 4");
    require(ts.output_width >= ts.patch_size && ts.output_height >= ts.patch_size &&
                ts.output_width % ts.patch_size == 0 && ts.output_height % ts.patch_size == 0,
            ErrorKind::parameter, "texsynth output dimensions must be multiples of patch_size");
    require(c.metrics.ssim.window >= 1 && c.metrics.glcm.levels >= 2 && c.metrics.ch_bins >= 1 &&
                c.metrics.edge_haar_levels >= 1 && c.metrics.psnr_peak > 0.0,
            ErrorKind::parameter, "metrics parameters out of range");
    require(c.curation.target_size >= 1, ErrorKind::parameter, "curation.target_size must be >= 1");
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
    using detail::ConfigReader;
    PipelineConfig c;
    const ConfigReader root(j, "", {"seed", "linefusion", "baselayer", "texsynth", "metrics", "curation"});
    root.get("seed", c.seed);

    if (root.has("linefusion")) {
        const ConfigReader r(root.at("linefusion"), "linefusion",
                             {"se_shape", "se_radius", "ink_threshold", "haar_levels",
                              "keep_fraction", "weights"});
        std::string shape = to_string(c.linefusion.se.shape);
        r.get("se_shape", shape);
        c.linefusion.se.shape = parse_shape(shape);
        r.get("se_radius", c.linefusion.se.radius);
        r.get("ink_threshold", c.linefusion.ink_threshold);
        r.get("haar_levels", c.linefusion.haar_levels);
        r.get("keep_fraction", c.linefusion.keep_fraction);
        if (r.has("weights")) {
            const ConfigReader w(r.at("weights"), "linefusion.weights", {"double", "single", "soft"});
            w.get("double", c.linefusion.weights.double_line);
            w.get("single", c.linefusion.weights.single_line);
            w.get("soft", c.linefusion.weights.soft_edge);
        }
    }
    if (root.has("baselayer")) {
        const ConfigReader r(root.at("baselayer"), "baselayer",
                             {"retinex_scales", "retinex_weights", "retinex_epsilon",
                              "blend_factor", "latent_scale", "schedule"});
        r.get("retinex_scales", c.baselayer.retinex.scales);
        r.get("retinex_weights", c.baselayer.retinex.weights);
        r.get("retinex_epsilon", c.baselayer.retinex.epsilon);
        r.get("blend_factor", c.baselayer.blend_factor);
        r.get("latent_scale", c.baselayer.latent_mapping.scale);
        if (r.has("schedule")) {
            const ConfigReader s(r.at("schedule"), "baselayer.schedule",
                                 {"steps", "beta_start", "beta_end"});
            s.get("steps", c.baselayer.schedule.steps);
            s.get("beta_start", c.baselayer.schedule.beta_start);
            s.get("beta_end", c.baselayer.schedule.beta_end);
        }
    }
    if (root.has("texsynth")) {
        const ConfigReader r(root.at("texsynth"), "texsynth",
                             {"patch_size", "output_width", "output_height", "mode"});
        r.get("patch_size", c.texsynth.patch_size);
        r.get("output_width", c.texsynth.output_width);
        r.get("output_height", c.texsynth.output_height);
        std::string mode = to_string(c.texsynth.mode);
        r.get("mode", mode);
        c.texsynth.mode = parse_sampling_mode(mode);
    }
    if (root.has("metrics")) {
        const ConfigReader r(root.at("metrics"), "metrics",
                             {"ssim_window", "ssim_dynamic_range", "ssim_k1", "ssim_k2",
                              "psnr_peak", "psnr_cap_db", "glcm_levels", "glcm_offsets",
                              "glcm_symmetric", "glcm_statistic", "ch_bins", "ch_metric",
                              "edge_threshold", "edge_haar_levels"});
        auto& m = c.metrics;
        r.get("ssim_window", m.ssim.window);
        r.get("ssim_dynamic_range", m.ssim.dynamic_range);
        r.get("ssim_k1", m.ssim.k1);
        r.get("ssim_k2", m.ssim.k2);
        r.get("psnr_peak", m.psnr_peak);
        r.get("psnr_cap_db", m.psnr_cap_db);
        r.get("glcm_levels", m.glcm.levels);
        if (r.has("glcm_offsets")) {
            std::vector<std::vector<int>> offs;
            r.get("glcm_offsets", offs);
            m.glcm.offsets.clear();
            for (const auto& o : offs) {
                require(o.size() == 2, ErrorKind::parameter, "metrics.glcm_offsets entries are [dx, dy]");
                m.glcm.offsets.push_back({o[0], o[1]});
            }
        }
        r.get("glcm_symmetric", m.glcm.symmetric);
        std::string stat = to_string(m.glcm_statistic);
        r.get("glcm_statistic", stat);
        m.glcm_statistic = parse_glcm_statistic(stat);
        std::string ch_metric = "l1_total_variation";
        r.get("ch_metric", ch_metric);
        require(ch_metric == "l1_total_variation", ErrorKind::parameter,
                "metrics.ch_metric supports only 'l1_total_variation'");
        r.get("ch_bins", m.ch_bins);
        r.get("edge_threshold", m.edge_threshold);
        r.get("edge_haar_levels", m.edge_haar_levels);
    }
    if (root.has("curation")) {
        const ConfigReader r(root.at("curation"), "curation", {"target_size"});
        r.get("target_size", c.curation.target_size);
    }
    validate(c);
    return c;
}

/// Explicit path first, then $LINEART_CONFIG, else built-in defaults.
inline PipelineConfig load_config(const std::string& explicit_path = {}) {
    std::string path = explicit_path;
    if (path.empty())
        if (const char* env = std::getenv(kConfigEnvVar)) path = env;
    if (path.empty()) return PipelineConfig{};
    try {
        return config_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::parse_error& ex) {
        fail(ErrorKind::parameter, path + ": " + ex.what());
    }
}

}  // namespace lineart
