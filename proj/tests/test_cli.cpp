#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>

#include "support/fixtures.hpp"

using namespace lineart;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string output;
};

Run cli(const std::string& args, const fs::path& log, const std::string& env = {}) {
    const std::string cmd = env + " \"" LINEART_CLI "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(log)};
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

struct Workspace {
    fs::path dir = fixture::scratch("cli");
    fixture::Inputs in = fixture::write_inputs(dir);
    fs::path log = dir / "log.txt";
    fs::path config = dir / "config.json";
    Workspace() { write_file(config, to_json(fixture::small_config()).dump()); }
};

}  // namespace

TEST_CASE("cli bundle and validate") {
    Workspace w;
    const auto r = cli("bundle --config " + q(w.config) + " --drawing " + q(w.in.bundle.drawing) +
                           " --appearance " + q(w.in.bundle.appearance) + " --g-initial " +
                           q(*w.in.bundle.g_initial) + " --out " + q(w.dir / "b"),
                       w.log);
    INFO(r.output);
    REQUIRE(r.code == 0);
    CHECK(cli("validate " + q(w.dir / "b"), w.log).code == 0);
    CHECK(load_bundle(w.dir / "b").meta.at("files").size() == 6);

    fs::remove(w.dir / "b" / "texture.png");
    const auto bad = cli("validate " + q(w.dir / "b"), w.log);
    CHECK(bad.code == 2);
    CHECK_THAT(bad.output, Catch::Matchers::ContainsSubstring("texture.png: missing"));
}

TEST_CASE("cli staged stages reseal an existing bundle") {
    Workspace w;
    const fs::path out = w.dir / "staged";
    REQUIRE(cli("bundle --config " + q(w.config) + " --drawing " + q(w.in.bundle.drawing) +
                    " --appearance " + q(w.in.bundle.appearance) + " --out " + q(out),
                w.log)
                .code == 0);
    CHECK(load_bundle(out).state() == kStateAwaiting);
    const auto r = cli("fuse --config " + q(w.config) + " --drawing " + q(w.in.bundle.drawing) +
                           " --g-initial " + q(*w.in.bundle.g_initial) + " --out " + q(out),
                       w.log);
    INFO(r.output);
    REQUIRE(r.code == 0);
    const auto b = load_bundle(out);
    CHECK(b.state() == kStateComplete);
    CHECK(b.meta.at("inputs").contains("g_initial"));
    CHECK(b.meta.at("inputs").contains("appearance"));
}

TEST_CASE("cli individual stages") {
    Workspace w;
    SECTION("shape") {
        REQUIRE(cli("shape --appearance " + q(w.in.bundle.appearance) + " --out " + q(w.dir / "s"), w.log).code == 0);
        const auto j = nlohmann::json::parse(read_file(w.dir / "s" / "illumination.json"));
        CHECK(j.at("l_mean").get<double>() > 0.0);
        CHECK(fs::exists(w.dir / "s" / "schedule.json"));
    }
    SECTION("synth honours the seed override") {
        const std::string base = "synth --config " + q(w.config) + " --appearance " + q(w.in.bundle.appearance);
        REQUIRE(cli(base + " --seed 1 --out " + q(w.dir / "t1"), w.log).code == 0);
        REQUIRE(cli(base + " --seed 1 --out " + q(w.dir / "t2"), w.log).code == 0);
        REQUIRE(cli(base + " --seed 2 --out " + q(w.dir / "t3"), w.log).code == 0);
        CHECK(read_file(w.dir / "t1" / "texture.png") == read_file(w.dir / "t2" / "texture.png"));
        CHECK(read_file(w.dir / "t1" / "texture.png") != read_file(w.dir / "t3" / "texture.png"));
        CHECK(nlohmann::json::parse(read_file(w.dir / "t3" / "texture.json")).at("seed") == 2);
    }
    SECTION("config from the environment") {
        const auto r = cli("synth --appearance " + q(w.in.bundle.appearance) + " --out " + q(w.dir / "env"), w.log,
                           std::string(kConfigEnvVar) + "=" + q(w.config));
        REQUIRE(r.code == 0);
        CHECK(nlohmann::json::parse(read_file(w.dir / "env" / "texture.json")).at("patch_size") == 16);
    }
    SECTION("eval single pair and batch") {
        write_png(w.dir / "gen.png", fixture::appearance(3));
        REQUIRE(cli("fuse --drawing " + q(w.in.bundle.drawing) + " --out " + q(w.dir / "f"), w.log).code == 0);
        const auto r = cli("eval --id one --generated " + q(w.dir / "gen.png") + " --condition " +
                               q(w.dir / "f" / "condition.png") + " --appearance " + q(w.in.bundle.appearance) +
                               " --out " + q(w.dir / "e"),
                           w.log);
        INFO(r.output);
        REQUIRE(r.code == 0);
        const auto rep = nlohmann::json::parse(read_file(w.dir / "e" / "one.json"));
        CHECK(rep.at("id") == "one");
        CHECK(rep.contains("parameters"));
        write_file(w.dir / "pairs.csv", "id,generated,condition,appearance\n"
                                        "p1," + (w.dir / "gen.png").string() + "," +
                                            (w.dir / "f" / "condition.png").string() + "," +
                                            w.in.bundle.appearance.string() + "\n"
                                        "p2," + w.in.bundle.appearance.string() + "," +
                                            (w.dir / "f" / "condition.png").string() + "," +
                                            w.in.bundle.appearance.string() + "\n");
        REQUIRE(cli("eval --pairs " + q(w.dir / "pairs.csv") + " --out " + q(w.dir / "batch"), w.log).code == 0);
        const std::string csv = read_file(w.dir / "batch" / "metrics.csv");
        CHECK(csv.rfind("id,ssim,psnr_db,chamfer,glcm_distance,ch_loss", 0) == 0);
        CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
        CHECK(fs::exists(w.dir / "batch" / "p2.json"));
    }
    SECTION("curate with scores and with the proxy") {
        const fs::path src = w.dir / "drawings";
        fs::create_directories(src);
        write_png(src / "a.png", fixture::drawing(40, 30));
        write_png(src / "b.png", fixture::drawing(32, 32));
        write_png(src / "c.png", GrayImage(20, 20, 1.0));
        write_file(w.dir / "scores.csv", "id,score\na,0.2576\nb,0.31\nc,0.27\n");
        const auto r = cli("curate --rule bronze --scores " + q(w.dir / "scores.csv") + " --target-size 48 --out " +
                               q(w.dir / "cur") + " " + q(src),
                           w.log);
        INFO(r.output);
        REQUIRE(r.code == 0);
        const auto m = read_manifest(w.dir / "cur" / "manifest.jsonl");
        REQUIRE(m.size() == 3);
        CHECK(m[0].status == EntryStatus::accepted);
        CHECK(read_png_gray(m[0].output_path).width() == 48);
        CHECK(m[1].status == EntryStatus::rejected_high);
        CHECK(m[1].excluded_by == 0.2903);
        CHECK(m[2].status == EntryStatus::failed);
        CHECK(fs::exists(w.dir / "cur" / "summary.json"));

        REQUIRE(cli("curate --rule 0,1 --proxy --target-size 32 --out " + q(w.dir / "prox") + " " + q(src), w.log).code == 0);
        const auto p = read_manifest(w.dir / "prox" / "manifest.jsonl");
        REQUIRE(p.size() == 3);
        CHECK(p[0].score->source == ScoreSource::builtin_proxy);
    }
}

TEST_CASE("cli error exit codes") {
    Workspace w;
    CHECK(cli("", w.log).code == 3);
    CHECK(cli("frobnicate", w.log).code == 3);
    CHECK(cli("fuse --drawing " + q(w.dir / "nope.png") + " --out " + q(w.dir / "x"), w.log).code == 3);
    CHECK(cli("fuse --drawing " + q(w.in.bundle.drawing), w.log).code == 3);
    write_file(w.dir / "unknown.json", R"({"linefusion": {"radius": 3}})");
    const auto r = cli("fuse --config " + q(w.dir / "unknown.json") + " --drawing " + q(w.in.bundle.drawing) +
                           " --out " + q(w.dir / "x"),
                       w.log);
    CHECK(r.code == 3);
    CHECK_THAT(r.output, Catch::Matchers::ContainsSubstring("unknown config key 'linefusion.radius'"));
    write_png(w.dir / "blank.png", GrayImage(16, 16, 1.0));
    CHECK(cli("fuse --drawing " + q(w.dir / "blank.png") + " --out " + q(w.dir / "x"), w.log).code == 3);
    CHECK(cli("validate " + q(w.dir / "not_a_bundle"), w.log).code == 2);
    CHECK(cli("curate --rule silver --proxy --out " + q(w.dir / "c") + " " + q(w.in.bundle.drawing), w.log).code == 3);
    CHECK(cli("curate --rule bronze --out " + q(w.dir / "c") + " " + q(w.in.bundle.drawing), w.log).code == 3);
}
