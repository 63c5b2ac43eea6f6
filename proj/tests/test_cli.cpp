#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "affectfuse/cli.hpp"
#include "test_util.hpp"

using namespace affectfuse;
using aftest::TempDir;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("affectfuse");
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliResult r;
    r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::string small_log() {
    std::vector<Observation> log = {
        aftest::make_obs(0, "amy", facial_label(EmotionLabel::interested)),
        aftest::make_obs(100, "amy", posture_label(PostureLabel::writing)),
        aftest::make_obs(5200, "amy", facial_label(EmotionLabel::confused)),
        aftest::make_obs(5300, "ben", speech_label(EmotionLabel::neutral)),
    };
    return observations_to_jsonl(log);
}

}  // namespace

TEST_CASE("fuse writes timelines, rollups, a summary, and one manifest") {
    TempDir dir("fuse");
    const auto input = dir.file("observations.jsonl");
    aftest::write_file(input, small_log());
    const auto out_dir = dir.file("out");

    const CliResult r =
        run_cli({"fuse", input.string(), "--out", out_dir.string()});
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(out_dir / "timeline.jsonl"));
    CHECK(std::filesystem::exists(out_dir / "rollup.jsonl"));
    CHECK(std::filesystem::exists(out_dir / "summary.txt"));
    CHECK(std::filesystem::exists(out_dir / "manifest.json"));
    CHECK(r.out.find("amy") != std::string::npos);

    const json manifest = json::parse(aftest::read_file(out_dir / "manifest.json"));
    CHECK(manifest.at("command") == "fuse");
    CHECK(manifest.at("version") == kVersion);
    const std::string mapping_digest = manifest.at("configs").at("mapping");
    CHECK(mapping_digest.rfind("fnv1a64:", 0) == 0);
    CHECK(mapping_digest.size() == 8 + 16);
    CHECK(manifest.at("inputs")[0] == input.string());
    for (const auto& o : manifest.at("outputs")) {
        CHECK(o.get<std::string>().find('/') == std::string::npos);  // relative names
    }
    CHECK_FALSE(manifest.contains("seed"));
}

TEST_CASE("fuse emits byte-identical outputs when run twice") {
    TempDir dir("fuse_repeat");
    const auto input = dir.file("observations.jsonl");
    aftest::write_file(input, small_log());
    const auto out_a = dir.file("a");
    const auto out_b = dir.file("b");

    REQUIRE(run_cli({"fuse", input.string(), "--out", out_a.string()}).code == 0);
    REQUIRE(run_cli({"fuse", input.string(), "--out", out_b.string()}).code == 0);
    for (const char* name : {"timeline.jsonl", "rollup.jsonl", "summary.txt", "manifest.json"}) {
        CHECK(aftest::read_file(out_a / name) == aftest::read_file(out_b / name));
    }
}

TEST_CASE("fuse can stream machine-readable lines to stdout") {
    TempDir dir("fuse_jsonl");
    const auto input = dir.file("observations.jsonl");
    aftest::write_file(input, small_log());

    const CliResult r = run_cli({"fuse", input.string(), "--out",
                                 dir.file("out").string(), "--format", "jsonl"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::size_t parsed = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        CHECK_NOTHROW(json::parse(line));
        ++parsed;
    }
    CHECK(parsed >= 3);  // at least two timeline lines and one rollup
}

TEST_CASE("fuse window geometry is adjustable from the command line") {
    TempDir dir("fuse_window");
    const auto input = dir.file("observations.jsonl");
    aftest::write_file(input, small_log());
    const auto out_dir = dir.file("out");

    const CliResult r = run_cli({"fuse", input.string(), "--out", out_dir.string(),
                                 "--window-ms", "10000", "--stride-ms", "5000",
                                 "--format", "jsonl"});
    REQUIRE(r.code == 0);

    // amy's observations at 0..5300 under a 10000/5000 sliding grid produce
    // windows starting at 0 and 5000.
    std::istringstream lines(aftest::read_file(out_dir / "timeline.jsonl"));
    std::string line;
    std::vector<std::int64_t> amy_starts;
    while (std::getline(lines, line)) {
        const json j = json::parse(line);
        if (j.at("student") == "amy") amy_starts.push_back(j.at("window_start"));
    }
    CHECK(amy_starts == std::vector<std::int64_t>{0, 5000});
}

TEST_CASE("fuse rejects a stride wider than the window") {
    TempDir dir("fuse_badspec");
    const auto input = dir.file("observations.jsonl");
    aftest::write_file(input, small_log());
    const CliResult r = run_cli({"fuse", input.string(), "--out", dir.file("o").string(),
                                 "--window-ms", "5000", "--stride-ms", "6000"});
    CHECK(r.code == 1);
    CHECK(r.err.find("stride") != std::string::npos);
}

TEST_CASE("fuse distinguishes unusable inputs from invalid configs") {
    TempDir dir("fuse_errors");

    SECTION("missing input file") {
        const CliResult r = run_cli({"fuse", dir.file("absent.jsonl").string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("absent.jsonl") != std::string::npos);
    }
    SECTION("malformed line is reported with its number") {
        const auto input = dir.file("bad.jsonl");
        aftest::write_file(
            input,
            "{\"ts\": 0, \"student\": \"a\", \"cue\": \"facial\", \"label\": \"bored\"}\n"
            "{broken\n");
        const CliResult r = run_cli({"fuse", input.string(), "--out", dir.file("o").string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("line 2") != std::string::npos);
        CHECK(r.err.find("bad.jsonl") != std::string::npos);
    }
    SECTION("unsorted input") {
        std::vector<Observation> log = {
            aftest::make_obs(5000, "a", facial_label(EmotionLabel::bored)),
            aftest::make_obs(0, "a", facial_label(EmotionLabel::bored)),
        };
        const auto input = dir.file("unsorted.jsonl");
        aftest::write_file(input, observations_to_jsonl(log));
        const CliResult r = run_cli({"fuse", input.string(), "--out", dir.file("o").string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("sorted") != std::string::npos);
    }
    SECTION("fusion config with findings") {
        const auto input = dir.file("ok.jsonl");
        aftest::write_file(input, small_log());
        const auto config = dir.file("fusion.json");
        aftest::write_file(config, R"({"cue_weights": {"facial": -1.0}})");
        const CliResult r = run_cli({"fuse", input.string(), "--out", dir.file("o").string(),
                                     "--fusion-config", config.string()});
        CHECK(r.code == 1);
        CHECK(r.err.find("fusion:") != std::string::npos);
    }
    SECTION("unparseable mapping file") {
        const auto input = dir.file("ok2.jsonl");
        aftest::write_file(input, small_log());
        const auto mapping = dir.file("mapping.json");
        aftest::write_file(mapping, R"({"eye": {"looking_away": ["joyful"]}})");
        const CliResult r = run_cli({"fuse", input.string(), "--out", dir.file("o").string(),
                                     "--mapping", mapping.string()});
        CHECK(r.code == 1);
        CHECK(r.err.find("joyful") != std::string::npos);
    }
}

TEST_CASE("simulate writes a session and records the seed in its manifest") {
    TempDir dir("simulate");
    const auto out_dir = dir.file("session");
    const CliResult r = run_cli({"simulate", "--students", "3", "--ticks", "10",
                                 "--seed", "11", "--out", out_dir.string()});
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    CHECK(std::filesystem::exists(out_dir / "observations.jsonl"));
    CHECK(std::filesystem::exists(out_dir / "ground_truth.jsonl"));

    const json manifest = json::parse(aftest::read_file(out_dir / "manifest.json"));
    CHECK(manifest.at("command") == "simulate");
    CHECK(manifest.at("seed") == 11);

    const auto truth = load_ground_truth(out_dir / "ground_truth.jsonl");
    CHECK(truth.size() == 30);
}

TEST_CASE("simulate honors a params file with flag overrides on top") {
    TempDir dir("simulate_params");
    const auto params = dir.file("params.json");
    aftest::write_file(params, R"({"students": 2, "ticks": 5, "seed": 1})");
    const auto out_dir = dir.file("session");

    const CliResult r = run_cli({"simulate", "--params", params.string(), "--ticks", "8",
                                 "--out", out_dir.string()});
    REQUIRE(r.code == 0);
    const auto truth = load_ground_truth(out_dir / "ground_truth.jsonl");
    CHECK(truth.size() == 2 * 8);  // students from file, ticks from the flag

    const json manifest = json::parse(aftest::read_file(out_dir / "manifest.json"));
    CHECK(manifest.at("inputs")[0] == params.string());
    CHECK(manifest.at("seed") == 1);
}

TEST_CASE("simulate rejects invalid parameters with a pointed message") {
    TempDir dir("simulate_bad");
    const auto params = dir.file("params.json");
    aftest::write_file(params, R"({
        "transition": [[1,0,0,0,0],[0,1,0,0,0],[0.4,0.3,0.2,0.05,0],[0,0,0,1,0],[0,0,0,0,1]]
    })");
    const CliResult r =
        run_cli({"simulate", "--params", params.string(), "--out", dir.file("o").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("transition row 2") != std::string::npos);
}

TEST_CASE("repeated simulate runs with one seed are byte-identical") {
    TempDir dir("simulate_repeat");
    const auto a = dir.file("a");
    const auto b = dir.file("b");
    const std::vector<std::string> base = {"simulate", "--students", "4", "--ticks", "12",
                                           "--seed", "5"};
    std::vector<std::string> run_a = base;
    run_a.insert(run_a.end(), {"--out", a.string()});
    std::vector<std::string> run_b = base;
    run_b.insert(run_b.end(), {"--out", b.string()});
    REQUIRE(run_cli(run_a).code == 0);
    REQUIRE(run_cli(run_b).code == 0);
    for (const char* name : {"observations.jsonl", "ground_truth.jsonl", "manifest.json"}) {
        CHECK(aftest::read_file(a / name) == aftest::read_file(b / name));
    }
}

TEST_CASE("evaluate scores a simulated session end to end") {
    TempDir dir("evaluate");
    const auto session = dir.file("session");
    REQUIRE(run_cli({"simulate", "--students", "4", "--ticks", "25", "--seed", "3",
                     "--out", session.string()})
                .code == 0);

    const auto report_dir = dir.file("report");
    const CliResult r =
        run_cli({"evaluate", session.string(), "--out", report_dir.string()});
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("session accuracy") != std::string::npos);
    CHECK(r.out.find("fused") != std::string::npos);

    const json report = json::parse(aftest::read_file(report_dir / "report.json"));
    CHECK(report.at("truth_count") == 100);
    CHECK(report.at("per_cue").contains("facial"));
    CHECK(report.at("per_cue").at("speech").contains("session_accuracy"));
    CHECK(report.at("fused").at("counts").is_array());

    const CliResult machine = run_cli({"evaluate", session.string(), "--out",
                                       dir.file("report2").string(), "--format", "jsonl"});
    REQUIRE(machine.code == 0);
    CHECK_NOTHROW(json::parse(machine.out));
}

TEST_CASE("evaluate separates missing sessions from corrupt ones") {
    TempDir dir("evaluate_errors");

    SECTION("missing ground truth") {
        const auto session = dir.file("half");
        std::filesystem::create_directories(session);
        aftest::write_file(session / "observations.jsonl", small_log());
        const CliResult r = run_cli({"evaluate", session.string()});
        CHECK(r.code == 1);
        CHECK(r.err.find("ground") != std::string::npos);
    }
    SECTION("corrupt observations") {
        const auto session = dir.file("corrupt");
        std::filesystem::create_directories(session);
        aftest::write_file(session / "observations.jsonl", "{nope\n");
        aftest::write_file(session / "ground_truth.jsonl",
                           R"({"ts": 2500, "student": "a", "emotion": "bored"})"
                           "\n");
        const CliResult r = run_cli({"evaluate", session.string()});
        CHECK(r.code == 2);
        CHECK(r.err.find("line 1") != std::string::npos);
    }
    SECTION("observations from a student with no ground truth") {
        const auto session = dir.file("mismatch");
        std::filesystem::create_directories(session);
        std::vector<Observation> log = {
            aftest::make_obs(2500, "ghost", facial_label(EmotionLabel::bored)),
        };
        aftest::write_file(session / "observations.jsonl", observations_to_jsonl(log));
        aftest::write_file(session / "ground_truth.jsonl",
                           R"({"ts": 2500, "student": "real", "emotion": "bored"})"
                           "\n");
        const CliResult r = run_cli({"evaluate", session.string()});
        CHECK(r.code == 1);
        CHECK(r.err.find("ghost") != std::string::npos);
    }
}

TEST_CASE("validate-config accepts the defaults and the shipped files") {
    TempDir dir("validate");
    const CliResult builtin = run_cli({"validate-config", "--out", dir.file("m1").string()});
    CHECK(builtin.code == 0);
    CHECK(builtin.out.find("ok") != std::string::npos);
    CHECK(std::filesystem::exists(dir.file("m1") / "manifest.json"));

    const std::filesystem::path configs{AF_REPO_CONFIG_DIR};
    const CliResult shipped = run_cli(
        {"validate-config", "--mapping", (configs / "default_mapping.json").string(),
         "--fusion-config", (configs / "default_fusion.json").string(), "--out",
         dir.file("m2").string()});
    CHECK(shipped.code == 0);
    CHECK(shipped.out.find("ok") != std::string::npos);
}

TEST_CASE("validate-config reports findings and unparseable files") {
    TempDir dir("validate_bad");
    const auto fusion = dir.file("fusion.json");
    aftest::write_file(fusion, R"({"cue_weights": {"eye": -2}})");
    const CliResult findings = run_cli({"validate-config", "--fusion-config", fusion.string(),
                                        "--out", dir.file("m").string()});
    CHECK(findings.code == 1);
    CHECK(findings.err.find("fusion:") != std::string::npos);
    CHECK(findings.err.find("eye") != std::string::npos);

    const auto mapping = dir.file("mapping.json");
    aftest::write_file(mapping, "not json at all");
    const CliResult broken = run_cli({"validate-config", "--mapping", mapping.string(),
                                      "--out", dir.file("m3").string()});
    CHECK(broken.code == 1);
}

TEST_CASE("usage errors exit with the input-error code, help with success") {
    CHECK(run_cli({"--help"}).code == 0);
    CHECK(run_cli({"--version"}).out.find(kVersion) != std::string::npos);
    CHECK(run_cli({}).code == 2);                    // a subcommand is required
    CHECK(run_cli({"transmogrify"}).code == 2);      // unknown subcommand
    CHECK(run_cli({"fuse"}).code == 2);              // missing required input
    CHECK(run_cli({"simulate", "--students", "0"}).code == 2);  // rejected by range check

    TempDir dir("usage");
    const auto input = dir.file("observations.jsonl");
    aftest::write_file(input, small_log());
    CHECK(run_cli({"fuse", input.string(), "--format", "yaml"}).code == 2);
}
