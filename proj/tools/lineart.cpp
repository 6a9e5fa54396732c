#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lineart/lineart.hpp"

namespace fs = std::filesystem;
using namespace lineart;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitInput = 3;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool needs_out = true) {
    cmd->add_option("--config", c.config_path,
                    std::string("pipeline config JSON (default: $") + kConfigEnvVar + ")");
    cmd->add_option("--seed", c.seed, "override config seed");
    auto* out = cmd->add_option("--out", c.out, "output directory");
    if (needs_out) out->required();
}

PipelineConfig effective_config(const Common& c) {
    PipelineConfig cfg = load_config(c.config_path);
    if (c.seed) cfg.seed = *c.seed;
    validate(cfg);
    return cfg;
}

// When `out` already holds a bundle, refresh its hashes and input record.
void reseal_if_bundle(const fs::path& out, const std::map<std::string, fs::path>& inputs,
                      const PipelineConfig& cfg) {
    if (!fs::exists(out / "meta.json")) return;
    for (const char* name : kBundleFiles)
        if (!fs::exists(out / name)) return;
    nlohmann::json recorded = nlohmann::json::object();
    try {
        const auto meta = nlohmann::json::parse(read_file(out / "meta.json"));
        if (meta.contains("inputs") && meta["inputs"].is_object()) recorded = meta["inputs"];
    } catch (const nlohmann::json::exception&) {
    }
    for (const auto& [role, path] : inputs) recorded[role] = sha256_file(path);
    seal_bundle(out, recorded, cfg);
    validate_bundle(out);
    std::cout << "resealed bundle " << out.generic_string() << "\n";
}

std::vector<fs::path> collect_pngs(const std::vector<std::string>& args) {
    std::vector<fs::path> out;
    for (const auto& a : args) {
        const fs::path p(a);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".png") found.push_back(e.path());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            require(fs::exists(p), ErrorKind::input, a + ": no such file");
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conditioning toolkit for rendering appearance onto design line drawings"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // fuse
    Common fuse_c;
    std::string fuse_drawing, fuse_g_initial;
    auto* fuse_cmd = app.add_subcommand("fuse", "fuse double lines, single lines and soft edges");
    add_common(fuse_cmd, fuse_c);
    fuse_cmd->add_option("--drawing", fuse_drawing, "design drawing PNG")->required()->check(CLI::ExistingFile);
    fuse_cmd->add_option("--g-initial", fuse_g_initial, "first-pass generation PNG")->check(CLI::ExistingFile);

    // shape
    Common shape_c;
    std::string shape_appearance;
    auto* shape_cmd = app.add_subcommand("shape", "retinex illumination statistics and noise schedule");
    add_common(shape_cmd, shape_c);
    shape_cmd->add_option("--appearance", shape_appearance, "appearance reference PNG")
        ->required()->check(CLI::ExistingFile);

    // synth
    Common synth_c;
    std::string synth_appearance, synth_mask;
    auto* synth_cmd = app.add_subcommand("synth", "background-free patch-reassembled texture reference");
    add_common(synth_cmd, synth_c);
    synth_cmd->add_option("--appearance", synth_appearance, "appearance reference PNG")
        ->required()->check(CLI::ExistingFile);
    synth_cmd->add_option("--mask", synth_mask, "foreground mask PNG (white = material)")
        ->check(CLI::ExistingFile);

    // curate
    Common cur_c;
    std::string cur_rule, cur_scores;
    bool cur_proxy = false;
    std::optional<int> cur_target;
    std::vector<std::string> cur_inputs;
    auto* cur_cmd = app.add_subcommand("curate", "complexity filtering and drawing preprocessing");
    add_common(cur_cmd, cur_c);
    cur_cmd->add_option("--rule", cur_rule, "bronze|differsketching|imagenet-sketch|deeppatent or lo,hi")
        ->required();
    auto* scores_opt = cur_cmd->add_option("--scores", cur_scores, "CSV id,score")->check(CLI::ExistingFile);
    auto* proxy_opt = cur_cmd->add_flag("--proxy", cur_proxy, "score with the built-in complexity proxy");
    scores_opt->excludes(proxy_opt);
    cur_cmd->add_option("--target-size", cur_target, "output side length (default 512)");
    cur_cmd->add_option("inputs", cur_inputs, "drawing PNGs or directories")->required();

    // eval
    Common eval_c;
    std::string ev_generated, ev_condition, ev_appearance, ev_id = "pair", ev_pairs;
    auto* eval_cmd = app.add_subcommand("eval", "edge-fidelity and appearance metrics");
    add_common(eval_cmd, eval_c);
    eval_cmd->add_option("--generated", ev_generated)->check(CLI::ExistingFile);
    eval_cmd->add_option("--condition", ev_condition)->check(CLI::ExistingFile);
    eval_cmd->add_option("--appearance", ev_appearance)->check(CLI::ExistingFile);
    eval_cmd->add_option("--id", ev_id, "report id for a single pair");
    eval_cmd->add_option("--pairs", ev_pairs, "CSV id,generated,condition,appearance")
        ->check(CLI::ExistingFile);

    // bundle
    Common bun_c;
    BundleInputs bun_in;
    std::string bun_drawing, bun_appearance, bun_mask, bun_g_initial;
    auto* bun_cmd = app.add_subcommand("bundle", "assemble, hash and validate a conditioning bundle");
    add_common(bun_cmd, bun_c);
    bun_cmd->add_option("--drawing", bun_drawing)->required()->check(CLI::ExistingFile);
    bun_cmd->add_option("--appearance", bun_appearance)->required()->check(CLI::ExistingFile);
    bun_cmd->add_option("--mask", bun_mask, "appearance foreground mask")->check(CLI::ExistingFile);
    bun_cmd->add_option("--g-initial", bun_g_initial, "first-pass generation")->check(CLI::ExistingFile);

    // validate
    std::string val_dir;
    auto* val_cmd = app.add_subcommand("validate", "validate a conditioning bundle");
    val_cmd->add_option("bundle", val_dir, "bundle directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*fuse_cmd) {
            const auto cfg = effective_config(fuse_c);
            std::optional<GrayImage> g;
            if (!fuse_g_initial.empty()) g = read_png_gray(fuse_g_initial);
            const auto st = run_fuse(read_png_gray(fuse_drawing), g, cfg.linefusion);
            write_condition(fuse_c.out, st, cfg.linefusion);
            std::cout << "condition: " << st.state << ", "
                      << (st.soft ? st.soft->points.size() : 0) << " soft-edge points\n";
            std::map<std::string, fs::path> in{{"drawing", fuse_drawing}};
            if (g) in["g_initial"] = fuse_g_initial;
            reseal_if_bundle(fuse_c.out, in, cfg);
        } else if (*shape_cmd) {
            const auto cfg = effective_config(shape_c);
            const auto st = run_shape(read_png_rgb(shape_appearance), cfg.baselayer);
            write_illumination(shape_c.out, st, cfg.baselayer);
            std::cout << "l_mean " << st.stats.l_mean << " (" << st.stats.l_mean_255()
                      << "/255), sigma2 " << st.stats.sigma2 << "\n";
            reseal_if_bundle(shape_c.out, {{"appearance", shape_appearance}}, cfg);
        } else if (*synth_cmd) {
            const auto cfg = effective_config(synth_c);
            std::optional<BinaryMask> mask;
            if (!synth_mask.empty()) mask = read_png_mask(synth_mask);
            const auto tex = run_synth(read_png_rgb(synth_appearance), mask, cfg.texsynth, cfg.seed);
            write_texture(synth_c.out, tex);
            std::cout << "texture from " << tex.source_patch_count << " source patches\n";
            std::map<std::string, fs::path> in{{"appearance", synth_appearance}};
            if (mask) in["appearance_mask"] = synth_mask;
            reseal_if_bundle(synth_c.out, in, cfg);
        } else if (*cur_cmd) {
            auto cfg = effective_config(cur_c);
            if (cur_target) cfg.curation.target_size = *cur_target;
            validate(cfg);
            require(!cur_scores.empty() || cur_proxy, ErrorKind::input,
                    "curate needs --scores <file> or --proxy");
            const CurationRule rule = parse_rule(cur_rule);
            const auto files = collect_pngs(cur_inputs);
            const ScoreSource source = cur_proxy ? ScoreSource::builtin_proxy : ScoreSource::external_file;

            std::map<std::string, ComplexityScore> lookup;
            if (!cur_proxy)
                for (const auto& s : load_scores(cur_scores)) lookup[s.id] = s.score;

            std::vector<ManifestEntry> entries;
            ScoreTable table;
            std::map<std::string, fs::path> by_id;
            for (const auto& f : files) {
                const std::string id = f.stem().string();
                by_id[id] = f;
                if (cur_proxy) {
                    try {
                        table.push_back({id, complexity_proxy(read_png_gray(f))});
                    } catch (const Error& e) {
                        entries.push_back({f.generic_string(), id, std::nullopt, EntryStatus::failed,
                                           std::nullopt, e.what(), "", std::nullopt, ""});
                    }
                } else if (auto it = lookup.find(id); it != lookup.end()) {
                    table.push_back({id, it->second});
                } else {
                    entries.push_back({f.generic_string(), id, std::nullopt, EntryStatus::failed,
                                       std::nullopt, "no score for id", "", std::nullopt, ""});
                }
            }
            const Partition part = filter_by_threshold(table, rule);
            std::map<std::string, ComplexityScore> scored;
            for (const auto& s : table) scored[s.id] = s.score;
            const fs::path out(cur_c.out);
            for (const auto& id : part.accepted) {
                ManifestEntry e = preprocess(by_id[id], id, out / "images", cfg.curation.target_size,
                                             cfg.linefusion.ink_threshold);
                e.score = scored[id];
                entries.push_back(std::move(e));
            }
            for (const auto& id : part.rejected_low)
                entries.push_back({by_id[id].generic_string(), id, scored[id], EntryStatus::rejected_low,
                                   rule.lo, "", "", std::nullopt, ""});
            for (const auto& id : part.rejected_high)
                entries.push_back({by_id[id].generic_string(), id, scored[id], EntryStatus::rejected_high,
                                   rule.hi, "", "", std::nullopt, ""});
            const auto summary = write_manifest(entries, out / "manifest.jsonl", rule, source);
            for (const auto& [k, v] : summary.counts) std::cout << k << ": " << v << "\n";
        } else if (*eval_cmd) {
            const auto cfg = effective_config(eval_c);
            struct Pair {
                std::string id, generated, condition, appearance;
            };
            std::vector<Pair> pairs;
            if (!ev_pairs.empty()) {
                std::istringstream in(read_file(ev_pairs));
                std::string line;
                int row = 0;
                while (std::getline(in, line)) {
                    ++row;
                    if (!line.empty() && line.back() == '\r') line.pop_back();
                    if (line.empty() || (row == 1 && line.rfind("id,", 0) == 0)) continue;
                    std::vector<std::string> cells;
                    std::stringstream ss(line);
                    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
                    require(cells.size() == 4, ErrorKind::input,
                            ev_pairs + " row " + std::to_string(row) + ": expected 4 columns");
                    pairs.push_back({cells[0], cells[1], cells[2], cells[3]});
                }
            } else {
                require(!ev_generated.empty() && !ev_condition.empty() && !ev_appearance.empty(),
                        ErrorKind::input, "eval needs --generated, --condition and --appearance, or --pairs");
                pairs.push_back({ev_id, ev_generated, ev_condition, ev_appearance});
            }
            const fs::path out(eval_c.out);
            fs::create_directories(out);
            std::string csv = join_csv(csv_header(cfg.metrics)) + "\n";
            for (const auto& p : pairs) {
                const auto report = evaluate_pair(read_png_rgb(p.generated), read_png_gray(p.condition),
                                                  read_png_rgb(p.appearance), cfg.metrics, p.id);
                write_json(out / (p.id + ".json"), to_json(report));
                csv += join_csv(csv_row(report)) + "\n";
                std::cout << p.id << ": ssim " << report.ssim << ", psnr " << report.psnr_db
                          << " dB, cd " << report.chamfer << ", glcm " << report.glcm_distance
                          << ", ch " << report.ch_loss << "\n";
            }
            write_file(out / "metrics.csv", csv);
        } else if (*bun_cmd) {
            const auto cfg = effective_config(bun_c);
            bun_in.drawing = bun_drawing;
            bun_in.appearance = bun_appearance;
            if (!bun_mask.empty()) bun_in.appearance_mask = fs::path(bun_mask);
            if (!bun_g_initial.empty()) bun_in.g_initial = fs::path(bun_g_initial);
            const auto b = build_bundle(bun_in, cfg, bun_c.out);
            std::cout << "bundle " << bun_c.out << " valid (" << b.state() << ")\n";
        } else if (*val_cmd) {
            const auto b = load_bundle(val_dir);
            std::cout << "valid (" << b.state() << ")\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::validation ? kExitValidation : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
