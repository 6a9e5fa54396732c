#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lineart/baselayer.hpp"
#include "lineart/config.hpp"
#include "lineart/digest.hpp"
#include "lineart/linefusion.hpp"
#include "lineart/png_io.hpp"
#include "lineart/texsynth.hpp"

namespace lineart {

inline constexpr int kBundleVersion = 1;
inline constexpr const char* kToolName = "lineart";
inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr std::array<const char*, 6> kBundleFiles{
    "condition.png", "condition.json", "texture.png",
    "texture.json",  "illumination.json", "schedule.json"};

inline constexpr const char* kStateAwaiting = "awaiting_initial_pass";
inline constexpr const char* kStateComplete = "complete";

namespace fs = std::filesystem;

// ---------------------------------------------------------------- stages

struct ConditionStage {
    GeometryCondition condition;
    std::optional<SoftEdgeMap> soft;
    std::string state;
};

/// Structure preservation: double and single lines from the drawing, soft
/// edges from the first-pass generation when one is supplied.
inline ConditionStage run_fuse(const GrayImage& drawing, const std::optional<GrayImage>& g_initial,
                               const LineFusionConfig& cfg) {
    const GrayImage l_double = invert(double_lines(drawing, cfg.se));
    const BinaryMask mask = extract_mask(drawing, cfg.ink_threshold);
    const SingleLines single = single_lines(mask, cfg.se);
    ConditionStage out;
    if (g_initial) {
        const GrayImage g = g_initial->same_shape(drawing)
                                ? *g_initial
                                : resize_bilinear(*g_initial, drawing.width(), drawing.height());
        out.soft = soft_edges(g, cfg.haar_levels, cfg.keep_fraction);
        out.condition = fuse(l_double, single.contour, *out.soft, cfg.weights);
        out.state = kStateComplete;
    } else {
        out.condition = fuse(l_double, single.contour, cfg.weights);
        out.state = kStateAwaiting;
    }
    return out;
}

struct IlluminationStage {
    IlluminationMap illumination;
    BrightnessStats stats;
};

inline IlluminationStage run_shape(const RgbImage& appearance, const BaseLayerConfig& cfg) {
    IlluminationStage s;
    s.illumination = retinex_illumination(luminance(appearance), cfg.retinex);
    s.stats = brightness_analysis(s.illumination);
    return s;
}

inline TextureReference run_synth(const RgbImage& appearance, const std::optional<BinaryMask>& mask,
                                  const TexSynthConfig& cfg, std::uint64_t seed) {
    const PatchGrid grid = extract_patches(remove_background(appearance, mask), cfg.patch_size);
    return reassemble(grid, cfg.output_width, cfg.output_height, seed, cfg.mode);
}

// ---------------------------------------------------------------- artifact writers

inline nlohmann::json to_json(const SoftEdgeMap& s) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.points) pts.push_back({{"x", p.x}, {"y", p.y}, {"magnitude", p.magnitude}});
    return pts;
}

inline SoftEdgeMap soft_edges_from_json(const nlohmann::json& j, int width, int height, int levels) {
    SoftEdgeMap s;
    s.source_width = width;
    s.source_height = height;
    s.levels = levels;
    for (const auto& p : j)
        s.points.push_back({p.at("x").get<int>(), p.at("y").get<int>(), p.at("magnitude").get<double>()});
    return s;
}

inline void write_json(const fs::path& path, const nlohmann::json& j) {
    write_file(path, j.dump(2) + "\n");
}

inline void write_condition(const fs::path& dir, const ConditionStage& st, const LineFusionConfig& cfg) {
    fs::create_directories(dir);
    write_png(dir / "condition.png", st.condition.image);
    const auto& w = st.condition.weights;
    nlohmann::json j{
        {"width", st.condition.image.width()},
        {"height", st.condition.image.height()},
        {"polarity", "strokes_bright"},
        {"fusion_rule", "weighted_max"},
        {"weights", {{"double", w.double_line}, {"single", w.single_line}, {"soft", w.soft_edge}}},
        {"provenance",
         {{"double", st.condition.provenance[0]},
          {"single", st.condition.provenance[1]},
          {"soft", st.condition.provenance[2]}}},
        {"structuring_element", {{"shape", to_string(cfg.se.shape)}, {"radius", cfg.se.radius}}},
        {"state", st.state},
    };
    if (st.soft)
        j["soft_edges"] = {{"levels", st.soft->levels},
                           {"keep_fraction", cfg.keep_fraction},
                           {"points", to_json(*st.soft)}};
    else
        j["soft_edges"] = nullptr;
    write_json(dir / "condition.json", j);
}

inline void write_illumination(const fs::path& dir, const IlluminationStage& st,
                               const BaseLayerConfig& cfg) {
    fs::create_directories(dir);
    const auto& m = cfg.latent_mapping;
    write_json(dir / "illumination.json",
               {{"l_mean", st.stats.l_mean},
                {"l_mean_255", st.stats.l_mean_255()},
                {"sigma2", st.stats.sigma2},
                {"scales", st.illumination.scales},
                {"weights", st.illumination.weights},
                {"epsilon", cfg.retinex.epsilon},
                {"blend_factor", cfg.blend_factor},
                {"latent_mapping",
                 {{"formula", "(2*v - 1) * scale"},
                  {"scale", m.scale},
                  {"l_mean_latent", m.to_latent(st.stats.l_mean)}}}});
    write_json(dir / "schedule.json",
               {{"T", cfg.schedule.steps},
                {"beta_start", cfg.schedule.beta_start},
                {"beta_end", cfg.schedule.beta_end},
                {"kind", "linear"}});
}

inline void write_texture(const fs::path& dir, const TextureReference& t) {
    fs::create_directories(dir);
    write_png(dir / "texture.png", t.image);
    write_json(dir / "texture.json",
               {{"seed", t.seed},
                {"patch_size", t.patch_size},
                {"source_patch_count", t.source_patch_count},
                {"mode", to_string(t.mode)},
                {"width", t.image.width()},
                {"height", t.image.height()}});
}

// ---------------------------------------------------------------- meta / validation

/// Raises a validation error naming the failing schema path.
[[noreturn]] inline void schema_fail(const std::string& path, const std::string& what) {
    fail(ErrorKind::validation, path + ": " + what);
}

namespace detail {

inline nlohmann::json read_json_artifact(const fs::path& dir, const std::string& name) {
    if (!fs::exists(dir / name)) schema_fail(name, "missing");
    try {
        return nlohmann::json::parse(read_file(dir / name));
    } catch (const nlohmann::json::parse_error&) {
        schema_fail(name, "not valid JSON");
    }
}

enum class JType { number, integer, string, boolean, object, array, number_array, nullable_object };

inline void expect(const nlohmann::json& j, const std::string& file, const std::string& key, JType t) {
    const std::string path = file + "/" + key;
    if (!j.is_object() || !j.contains(key)) schema_fail(path, "missing");
    const auto& v = j.at(key);
    bool ok = false;
    switch (t) {
        case JType::number: ok = v.is_number(); break;
        case JType::integer: ok = v.is_number_integer(); break;
        case JType::string: ok = v.is_string(); break;
        case JType::boolean: ok = v.is_boolean(); break;
        case JType::object: ok = v.is_object(); break;
        case JType::array: ok = v.is_array(); break;
        case JType::nullable_object: ok = v.is_object() || v.is_null(); break;
        case JType::number_array:
            ok = v.is_array() && std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_number(); });
            break;
    }
    if (!ok) schema_fail(path, "wrong type");
}

inline void check_range(bool ok, const std::string& path, const std::string& what) {
    if (!ok) schema_fail(path, what);
}

inline void validate_condition_json(const nlohmann::json& j, const std::string& state) {
    const std::string f = "condition.json";
    expect(j, f, "width", JType::integer);
    expect(j, f, "height", JType::integer);
    expect(j, f, "weights", JType::object);
    for (const char* k : {"double", "single", "soft"}) {
        expect(j.at("weights"), f + "/weights", k, JType::number);
        const double w = j.at("weights").at(k).get<double>();
        check_range(w >= 0.0 && w <= 1.0, f + "/weights/" + k, "outside [0,1]");
    }
    expect(j, f, "provenance", JType::object);
    expect(j, f, "state", JType::string);
    check_range(j.at("state") == state, f + "/state", "disagrees with meta.json state");
    expect(j, f, "soft_edges", JType::nullable_object);
    const bool complete = state == kStateComplete;
    check_range(complete == j.at("soft_edges").is_object(), f + "/soft_edges",
                complete ? "required for a complete bundle" : "present in an awaiting bundle");
    if (complete) {
        const auto& s = j.at("soft_edges");
        expect(s, f + "/soft_edges", "levels", JType::integer);
        expect(s, f + "/soft_edges", "points", JType::array);
        const int w = j.at("width").get<int>(), h = j.at("height").get<int>();
        for (const auto& p : s.at("points")) {
            const bool ok = p.is_object() && p.contains("x") && p.contains("y") &&
                            p.contains("magnitude") && p["x"].is_number_integer() &&
                            p["y"].is_number_integer() && p["magnitude"].is_number();
            check_range(ok, f + "/soft_edges/points", "malformed point");
            const int x = p["x"].get<int>(), y = p["y"].get<int>();
            const double m = p["magnitude"].get<double>();
            check_range(x >= 0 && y >= 0 && x < w && y < h && m > 0.0 && m <= 1.0,
                        f + "/soft_edges/points", "point out of range");
        }
    }
}

inline void validate_texture_json(const nlohmann::json& j) {
    const std::string f = "texture.json";
    expect(j, f, "seed", JType::integer);
    expect(j, f, "patch_size", JType::integer);
    expect(j, f, "source_patch_count", JType::integer);
    expect(j, f, "mode", JType::string);
    expect(j, f, "width", JType::integer);
    expect(j, f, "height", JType::integer);
    const int ps = j.at("patch_size").get<int>();
    check_range(ps >= 4, f + "/patch_size", "must be >= 4");
    check_range(j.at("source_patch_count").get<int>() >= 1, f + "/source_patch_count", "must be >= 1");
    check_range(j.at("width").get<int>() % ps == 0 && j.at("height").get<int>() % ps == 0,
                f + "/width", "not a multiple of patch_size");
    const auto mode = j.at("mode").get<std::string>();
    check_range(mode == "with_replacement" || mode == "without_replacement", f + "/mode",
                "unknown sampling mode");
}

inline void validate_illumination_json(const nlohmann::json& j) {
    const std::string f = "illumination.json";
    expect(j, f, "l_mean", JType::number);
    expect(j, f, "l_mean_255", JType::number);
    expect(j, f, "sigma2", JType::number);
    expect(j, f, "scales", JType::number_array);
    expect(j, f, "weights", JType::number_array);
    expect(j, f, "blend_factor", JType::number);
    expect(j, f, "latent_mapping", JType::object);
    expect(j.at("latent_mapping"), f + "/latent_mapping", "scale", JType::number);
    expect(j.at("latent_mapping"), f + "/latent_mapping", "l_mean_latent", JType::number);
    const double m = j.at("l_mean").get<double>();
    check_range(m >= 0.0 && m <= 1.0, f + "/l_mean", "outside [0,1]");
    check_range(j.at("sigma2").get<double>() >= 0.0, f + "/sigma2", "negative");
    const double bf = j.at("blend_factor").get<double>();
    check_range(bf >= 0.0 && bf <= 1.0, f + "/blend_factor", "outside [0,1]");
    check_range(j.at("scales").size() == j.at("weights").size(), f + "/weights",
                "length differs from scales");
}

inline void validate_schedule_json(const nlohmann::json& j) {
    const std::string f = "schedule.json";
    expect(j, f, "T", JType::integer);
    expect(j, f, "beta_start", JType::number);
    expect(j, f, "beta_end", JType::number);
    try {
        build_schedule(j.at("T").get<int>(), j.at("beta_start").get<double>(),
                       j.at("beta_end").get<double>());
    } catch (const Error& e) {
        schema_fail(f, e.what());
    }
}

inline RgbImage read_png_artifact(const fs::path& dir, const std::string& name) {
    try {
        return read_png_rgb(dir / name);
    } catch (const Error&) {
        schema_fail(name, "not a decodable PNG");
    }
}

}  // namespace detail

struct ConditioningBundle {
    fs::path root;
    nlohmann::json meta, condition, texture, illumination, schedule;
    std::string state() const { return meta.at("state").get<std::string>(); }
};

/// Full validation: meta schema, file presence, content hashes, per-file
/// schema, then raster decode and dimension agreement. Throws a validation
/// error whose message starts with the first failing path.
inline ConditioningBundle load_bundle(const fs::path& dir) {
    using detail::expect;
    using detail::JType;
    ConditioningBundle b;
    b.root = dir;
    b.meta = detail::read_json_artifact(dir, "meta.json");
    expect(b.meta, "meta.json", "version", JType::integer);
    if (b.meta.at("version").get<int>() != kBundleVersion)
        schema_fail("meta.json/version", "unsupported version " + b.meta.at("version").dump());
    expect(b.meta, "meta.json", "state", JType::string);
    const std::string state = b.state();
    if (state != kStateAwaiting && state != kStateComplete)
        schema_fail("meta.json/state", "unknown state '" + state + "'");
    expect(b.meta, "meta.json", "files", JType::object);
    expect(b.meta, "meta.json", "inputs", JType::object);
    expect(b.meta, "meta.json", "tool", JType::object);
    expect(b.meta, "meta.json", "config", JType::object);
    try {
        config_from_json(b.meta.at("config"));
    } catch (const Error& e) {
        schema_fail("meta.json/config", e.what());
    }

    const auto& files = b.meta.at("files");
    if (files.size() != kBundleFiles.size())
        schema_fail("meta.json/files", "expected " + std::to_string(kBundleFiles.size()) + " entries");
    for (const char* name : kBundleFiles) {
        expect(files, "meta.json/files", name, JType::string);
        if (!fs::exists(dir / name)) schema_fail(name, "missing");
        if (sha256_file(dir / name) != files.at(name).get<std::string>())
            schema_fail(name, "content hash mismatch");
    }

    b.condition = detail::read_json_artifact(dir, "condition.json");
    detail::validate_condition_json(b.condition, state);
    b.texture = detail::read_json_artifact(dir, "texture.json");
    detail::validate_texture_json(b.texture);
    b.illumination = detail::read_json_artifact(dir, "illumination.json");
    detail::validate_illumination_json(b.illumination);
    b.schedule = detail::read_json_artifact(dir, "schedule.json");
    detail::validate_schedule_json(b.schedule);

    const RgbImage cond = detail::read_png_artifact(dir, "condition.png");
    if (cond.width() != b.condition.at("width").get<int>() ||
        cond.height() != b.condition.at("height").get<int>())
        schema_fail("condition.png", "dimensions disagree with condition.json");
    const RgbImage tex = detail::read_png_artifact(dir, "texture.png");
    if (tex.width() != b.texture.at("width").get<int>() ||
        tex.height() != b.texture.at("height").get<int>())
        schema_fail("texture.png", "dimensions disagree with texture.json");
    return b;
}

inline void validate_bundle(const fs::path& dir) { load_bundle(dir); }

/// Hashes the six artifacts and writes meta.json. `inputs` maps input roles
/// (drawing, appearance, ...) to content digests.
inline void seal_bundle(const fs::path& dir, const nlohmann::json& inputs, const PipelineConfig& cfg) {
    const auto cond = detail::read_json_artifact(dir, "condition.json");
    if (!cond.contains("state") || !cond.at("state").is_string())
        schema_fail("condition.json/state", "missing");
    nlohmann::json files = nlohmann::json::object();
    for (const char* name : kBundleFiles) {
        if (!fs::exists(dir / name)) schema_fail(name, "missing");
        files[name] = sha256_file(dir / name);
    }
    write_json(dir / "meta.json", {{"version", kBundleVersion},
                                   {"state", cond.at("state")},
                                   {"tool", {{"name", kToolName}, {"version", kToolVersion}}},
                                   {"inputs", inputs},
                                   {"files", files},
                                   {"config", to_json(cfg)}});
}

struct BundleInputs {
    fs::path drawing;
    fs::path appearance;
    std::optional<fs::path> appearance_mask;
    std::optional<fs::path> g_initial;
};

inline nlohmann::json input_digests(const BundleInputs& in) {
    nlohmann::json j{{"drawing", sha256_file(in.drawing)}, {"appearance", sha256_file(in.appearance)}};
    if (in.appearance_mask) j["appearance_mask"] = sha256_file(*in.appearance_mask);
    if (in.g_initial) j["g_initial"] = sha256_file(*in.g_initial);
    return j;
}

/// Runs every stage, writes all artifacts into `out`, seals and validates.
inline ConditioningBundle build_bundle(const BundleInputs& in, const PipelineConfig& cfg,
                                       const fs::path& out) {
    validate(cfg);
    const GrayImage drawing = read_png_gray(in.drawing);
    const RgbImage appearance = read_png_rgb(in.appearance);
    std::optional<GrayImage> g_initial;
    if (in.g_initial) g_initial = read_png_gray(*in.g_initial);
    std::optional<BinaryMask> mask;
    if (in.appearance_mask) mask = read_png_mask(*in.appearance_mask);

    const ConditionStage cond = run_fuse(drawing, g_initial, cfg.linefusion);
    const IlluminationStage illum = run_shape(appearance, cfg.baselayer);
    const TextureReference tex = run_synth(appearance, mask, cfg.texsynth, cfg.seed);

    fs::create_directories(out);
    write_condition(out, cond, cfg.linefusion);
    write_illumination(out, illum, cfg.baselayer);
    write_texture(out, tex);
    seal_bundle(out, input_digests(in), cfg);
    return load_bundle(out);
}

}  // namespace lineart
