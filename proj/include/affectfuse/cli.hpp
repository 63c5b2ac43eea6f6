#pragma once

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "affectfuse/errors.hpp"
#include "affectfuse/fusion.hpp"
#include "affectfuse/io.hpp"
#include "affectfuse/mapping.hpp"
#include "affectfuse/metrics.hpp"
#include "affectfuse/sessions.hpp"
#include "affectfuse/simulator.hpp"
#include "affectfuse/version.hpp"

namespace affectfuse::cli {

// Exit codes shared by every command:
//   0 success, 1 validation findings or invalid configuration,
//   2 malformed or unreadable input data (and usage errors).

struct ResolvedConfigs {
    MappingTable table;
    FusionConfig config;
    std::string mapping_digest;
    std::string fusion_digest;
};

/// Loads mapping and fusion configs, falling back to the built-in defaults
/// when no path is given. Digests cover the file bytes, or the canonical
/// JSON serialization for built-ins, so a manifest pins the exact config
/// either way. Throws ConfigError.
inline ResolvedConfigs resolve_configs(const std::string& mapping_path,
                                       const std::string& fusion_path) {
    ResolvedConfigs r{default_mapping(), default_config(), "", ""};
    if (!mapping_path.empty()) {
        const auto bytes = detail::read_file_bytes(mapping_path);
        if (!bytes) throw ConfigError("cannot read mapping config: " + mapping_path);
        try {
            r.table = mapping_from_json(json::parse(*bytes));
        } catch (const json::exception& e) {
            throw ConfigError("mapping config " + mapping_path + ": " + e.what());
        }
        r.mapping_digest = content_digest(*bytes);
    } else {
        r.mapping_digest = content_digest(mapping_to_json(r.table).dump());
    }
    if (!fusion_path.empty()) {
        const auto bytes = detail::read_file_bytes(fusion_path);
        if (!bytes) throw ConfigError("cannot read fusion config: " + fusion_path);
        try {
            r.config = fusion_config_from_json(json::parse(*bytes));
        } catch (const json::exception& e) {
            throw ConfigError("fusion config " + fusion_path + ": " + e.what());
        }
        r.fusion_digest = content_digest(*bytes);
    } else {
        r.fusion_digest = content_digest(fusion_config_to_json(r.config).dump());
    }
    return r;
}

namespace detail_cli {

inline json manifest_json(std::string_view command, const ResolvedConfigs& configs,
                          std::vector<std::string> inputs, std::vector<std::string> outputs,
                          std::optional<std::uint64_t> seed) {
    json j;
    j["command"] = std::string(command);
    j["version"] = kVersion;
    j["configs"] = json{{"mapping", configs.mapping_digest},
                        {"fusion", configs.fusion_digest}};
    j["inputs"] = std::move(inputs);
    j["outputs"] = std::move(outputs);
    if (seed) j["seed"] = *seed;
    return j;
}

inline void write_manifest(const std::filesystem::path& out_dir, const json& manifest) {
    atomic_write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

/// Prints validation findings; returns true when any were printed.
inline bool print_findings(const MappingValidation& mv, const ConfigValidation& cv,
                           std::ostream& err) {
    for (const auto& f : mv.findings) err << "mapping: " << f.detail << "\n";
    for (const auto& f : cv.findings) err << "fusion: " << f.detail << "\n";
    return !mv.ok() || !cv.ok();
}

}  // namespace detail_cli

// ─── fuse ────────────────────────────────────────────────────────────────────

struct FuseOptions {
    std::string input;
    std::string mapping_path;  // empty means built-in default
    std::string fusion_path;
    std::int64_t window_ms = 5000;
    std::int64_t stride_ms = 0;  // 0 means tumbling: stride = width
    std::string out_dir = ".";
    std::string format = "text";
};

inline int run_fuse(const FuseOptions& o, std::ostream& out, std::ostream& err) {
    ResolvedConfigs configs;
    try {
        configs = resolve_configs(o.mapping_path, o.fusion_path);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 1;
    }
    if (detail_cli::print_findings(validate_mapping(configs.table),
                                   validate_config(configs.config), err)) {
        return 1;
    }
    const WindowSpec spec{o.window_ms, o.stride_ms > 0 ? o.stride_ms : o.window_ms};
    try {
        validate_window_spec(spec);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 1;
    }

    std::vector<Observation> observations;
    std::vector<StudentTimeline> timelines;
    try {
        observations = load_observations(o.input);
        timelines = fuse_stream(observations, spec, configs.config, configs.table);
    } catch (const InputFormatError& e) {
        err << o.input << ": " << e.what() << "\n";
        return 2;
    } catch (const UnsortedInputError& e) {
        err << o.input << ": " << e.what() << "\n";
        return 2;
    }
    const std::vector<ClassroomReport> rollups = rollup_timelines(timelines);

    const std::string timeline_jsonl = timelines_to_jsonl(timelines);
    const std::string rollup_jsonl = rollups_to_jsonl(rollups);
    const std::string text = format_timelines(timelines) + "\n" + format_rollups(rollups);
    try {
        const std::filesystem::path dir{o.out_dir};
        std::filesystem::create_directories(dir);
        atomic_write_file(dir / "timeline.jsonl", timeline_jsonl);
        atomic_write_file(dir / "rollup.jsonl", rollup_jsonl);
        atomic_write_file(dir / "summary.txt", text);
        detail_cli::write_manifest(
            dir, detail_cli::manifest_json("fuse", configs, {o.input},
                                           {"timeline.jsonl", "rollup.jsonl", "summary.txt"},
                                           std::nullopt));
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 2;
    }

    if (o.format == "jsonl") {
        out << timeline_jsonl << rollup_jsonl;
    } else {
        out << text;
    }
    return 0;
}

// ─── simulate ────────────────────────────────────────────────────────────────

struct SimulateOptions {
    std::string params_path;   // empty means defaults
    std::string mapping_path;
    std::optional<std::uint64_t> students;  // flags override the params file
    std::optional<std::uint64_t> ticks;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

inline int run_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
    SimParams params;
    ResolvedConfigs configs;
    try {
        if (!o.params_path.empty()) params = load_sim_params(o.params_path);
        configs = resolve_configs(o.mapping_path, "");
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 1;
    }
    if (o.students) params.students = static_cast<std::size_t>(*o.students);
    if (o.ticks) params.ticks = static_cast<std::size_t>(*o.ticks);
    if (o.seed) params.seed = *o.seed;

    if (detail_cli::print_findings(validate_mapping(configs.table), validate_params(params),
                                   err)) {
        return 1;
    }

    const SimulatedSession session = generate(params, configs.table);
    try {
        const std::filesystem::path dir{o.out_dir};
        std::filesystem::create_directories(dir);
        atomic_write_file(dir / "observations.jsonl",
                          observations_to_jsonl(session.observations));
        atomic_write_file(dir / "ground_truth.jsonl",
                          ground_truth_to_jsonl(session.ground_truth));
        std::vector<std::string> inputs;
        if (!o.params_path.empty()) inputs.push_back(o.params_path);
        detail_cli::write_manifest(
            dir, detail_cli::manifest_json("simulate", configs, std::move(inputs),
                                           {"observations.jsonl", "ground_truth.jsonl"},
                                           params.seed));
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 2;
    }
    out << "wrote " << session.observations.size() << " observations and "
        << session.ground_truth.size() << " ground-truth records for " << params.students
        << " students x " << params.ticks << " ticks (seed " << params.seed << ")\n";
    if (session.fallback_count > 0) {
        out << "note: " << session.fallback_count
            << " draws had no cue label mapping to the true emotion (uniform fallback)\n";
    }
    return 0;
}

// ─── evaluate ────────────────────────────────────────────────────────────────

struct EvaluateOptions {
    std::string session_dir;
    std::string mapping_path;
    std::string fusion_path;
    std::string out_dir = ".";
    std::string format = "text";
};

inline json evaluation_to_json(const EvaluationReport& report) {
    json per_cue = json::object();
    for (CueKind cue : kCues) {
        json entry = matrix_to_json(report.for_cue(cue));
        entry["session_accuracy"] = report.cue_session_accuracy(cue);
        per_cue[std::string(to_string(cue))] = std::move(entry);
    }
    json fused = matrix_to_json(report.fused);
    fused["session_accuracy"] = report.fused_session_accuracy();
    json j;
    j["per_cue"] = std::move(per_cue);
    j["fused"] = std::move(fused);
    j["truth_count"] = report.truth_count;
    j["fused_undecided"] = report.fused_undecided;
    return j;
}

inline std::string format_evaluation(const EvaluationReport& report) {
    std::ostringstream os;
    const auto session_line = [&](const ConfusionMatrix& m) {
        const std::uint64_t answered = m.total();
        os << "answered windows:  " << answered << " of " << report.truth_count << "\n";
        os << "session accuracy:  " << std::fixed << std::setprecision(4)
           << report.session_accuracy(m) << "  (unanswered windows count as misses)\n";
        os.unsetf(std::ios::fixed);
    };
    for (CueKind cue : kCues) {
        const ConfusionMatrix& m = report.for_cue(cue);
        os << format_matrix(m, std::string(to_string(cue)) + " baseline");
        if (m.total() > 0) {
            os << format_summary(m, summarize(m));
        } else {
            os << "(no events recorded)\n";
        }
        session_line(m);
        os << "\n";
    }
    os << format_matrix(report.fused, "fused");
    if (report.fused.total() > 0) os << format_summary(report.fused, summarize(report.fused));
    session_line(report.fused);
    os << "undecided windows: " << report.fused_undecided << "\n";
    return std::move(os).str();
}

inline int run_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
    const std::filesystem::path dir{o.session_dir};
    const std::filesystem::path obs_path = dir / "observations.jsonl";
    const std::filesystem::path truth_path = dir / "ground_truth.jsonl";
    if (!std::filesystem::exists(obs_path)) {
        err << "missing observations file: " << obs_path.string() << "\n";
        return 1;
    }
    if (!std::filesystem::exists(truth_path)) {
        err << "missing ground-truth file: " << truth_path.string() << "\n";
        return 1;
    }
    ResolvedConfigs configs;
    try {
        configs = resolve_configs(o.mapping_path, o.fusion_path);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 1;
    }
    if (detail_cli::print_findings(validate_mapping(configs.table),
                                   validate_config(configs.config), err)) {
        return 1;
    }

    std::vector<Observation> observations;
    std::vector<GroundTruthRecord> ground_truth;
    try {
        observations = load_observations(obs_path);
        ground_truth = load_ground_truth(truth_path);
    } catch (const InputFormatError& e) {
        err << e.what() << "\n";
        return 2;
    }

    std::set<std::string> truth_students;
    for (const GroundTruthRecord& r : ground_truth) truth_students.insert(r.student_id);
    for (const Observation& obs : observations) {
        if (!truth_students.contains(obs.student_id)) {
            err << "student id \"" << obs.student_id
                << "\" has observations but no ground truth\n";
            return 1;
        }
    }

    const EvaluationReport report =
        evaluate(observations, ground_truth, configs.config, configs.table);
    const std::string text = format_evaluation(report);
    const json report_json = evaluation_to_json(report);
    try {
        const std::filesystem::path out_path{o.out_dir};
        std::filesystem::create_directories(out_path);
        atomic_write_file(out_path / "report.json", report_json.dump(2) + "\n");
        atomic_write_file(out_path / "report.txt", text);
        detail_cli::write_manifest(
            out_path,
            detail_cli::manifest_json("evaluate", configs,
                                      {obs_path.string(), truth_path.string()},
                                      {"report.json", "report.txt"}, std::nullopt));
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 2;
    }

    if (o.format == "jsonl") {
        out << report_json.dump() << "\n";
    } else {
        out << text;
    }
    return 0;
}

// ─── validate-config ─────────────────────────────────────────────────────────

struct ValidateOptions {
    std::string mapping_path;
    std::string fusion_path;
    std::string out_dir = ".";
};

inline int run_validate(const ValidateOptions& o, std::ostream& out, std::ostream& err) {
    ResolvedConfigs configs;
    try {
        configs = resolve_configs(o.mapping_path, o.fusion_path);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 1;
    }
    const bool bad = detail_cli::print_findings(validate_mapping(configs.table),
                                                validate_config(configs.config), err);
    try {
        const std::filesystem::path dir{o.out_dir};
        std::filesystem::create_directories(dir);
        std::vector<std::string> inputs;
        if (!o.mapping_path.empty()) inputs.push_back(o.mapping_path);
        if (!o.fusion_path.empty()) inputs.push_back(o.fusion_path);
        detail_cli::write_manifest(dir,
                                   detail_cli::manifest_json("validate-config", configs,
                                                             std::move(inputs), {},
                                                             std::nullopt));
    } catch (const std::exception& e) {
        err << e.what() << "\n";
        return 2;
    }
    if (!bad) out << "ok\n";
    return bad ? 1 : 0;
}

// ─── entry point ─────────────────────────────────────────────────────────────

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decision-level multimodal affect fusion for classroom signals",
                 "affectfuse"};
    app.set_version_flag("--version", std::string("affectfuse ") + kVersion);
    app.require_subcommand(1);

    FuseOptions fuse_opts;
    auto* cmd_fuse = app.add_subcommand(
        "fuse", "Fuse an observation stream into per-student timelines and rollups");
    cmd_fuse->add_option("input", fuse_opts.input, "Observation JSONL file")->required();
    cmd_fuse->add_option("--mapping", fuse_opts.mapping_path,
                         "Mapping config JSON (default: built-in table)");
    cmd_fuse->add_option("--fusion-config", fuse_opts.fusion_path,
                         "Fusion config JSON (default: built-in config)");
    cmd_fuse->add_option("--window-ms", fuse_opts.window_ms, "Window width in ms")
        ->check(CLI::PositiveNumber);
    cmd_fuse->add_option("--stride-ms", fuse_opts.stride_ms,
                         "Window stride in ms (default: equal to width)")
        ->check(CLI::PositiveNumber);
    cmd_fuse->add_option("--out", fuse_opts.out_dir, "Output directory");
    cmd_fuse->add_option("--format", fuse_opts.format, "Stdout format")
        ->check(CLI::IsMember({"jsonl", "text"}));

    SimulateOptions sim_opts;
    std::uint64_t sim_students = 0;
    std::uint64_t sim_ticks = 0;
    std::uint64_t sim_seed = 0;
    auto* cmd_sim = app.add_subcommand(
        "simulate", "Generate a synthetic classroom session with known ground truth");
    cmd_sim->add_option("--params", sim_opts.params_path, "Simulation params JSON");
    auto* opt_students =
        cmd_sim->add_option("--students", sim_students, "Student count (overrides params)")
            ->check(CLI::PositiveNumber);
    auto* opt_ticks = cmd_sim->add_option("--ticks", sim_ticks, "Tick count (overrides params)")
                          ->check(CLI::PositiveNumber);
    auto* opt_seed = cmd_sim->add_option("--seed", sim_seed, "Seed (overrides params)");
    cmd_sim->add_option("--mapping", sim_opts.mapping_path,
                        "Mapping config JSON (default: built-in table)");
    cmd_sim->add_option("--out", sim_opts.out_dir, "Output directory");

    EvaluateOptions eval_opts;
    auto* cmd_eval = app.add_subcommand(
        "evaluate", "Score a session's observations against its ground truth");
    cmd_eval->add_option("session_dir", eval_opts.session_dir,
                         "Directory holding observations.jsonl and ground_truth.jsonl")
        ->required();
    cmd_eval->add_option("--mapping", eval_opts.mapping_path,
                         "Mapping config JSON (default: built-in table)");
    cmd_eval->add_option("--fusion-config", eval_opts.fusion_path,
                         "Fusion config JSON (default: built-in config)");
    cmd_eval->add_option("--out", eval_opts.out_dir, "Output directory");
    cmd_eval->add_option("--format", eval_opts.format, "Stdout format")
        ->check(CLI::IsMember({"jsonl", "text"}));

    ValidateOptions val_opts;
    auto* cmd_val =
        app.add_subcommand("validate-config", "Check mapping and fusion configs");
    cmd_val->add_option("--mapping", val_opts.mapping_path,
                        "Mapping config JSON (default: built-in table)");
    cmd_val->add_option("--fusion-config", val_opts.fusion_path,
                        "Fusion config JSON (default: built-in config)");
    cmd_val->add_option("--out", val_opts.out_dir, "Output directory for the run manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(cmd_fuse)) return run_fuse(fuse_opts, out, err);
        if (app.got_subcommand(cmd_sim)) {
            if (opt_students->count() > 0) sim_opts.students = sim_students;
            if (opt_ticks->count() > 0) sim_opts.ticks = sim_ticks;
            if (opt_seed->count() > 0) sim_opts.seed = sim_seed;
            return run_simulate(sim_opts, out, err);
        }
        if (app.got_subcommand(cmd_eval)) return run_evaluate(eval_opts, out, err);
        if (app.got_subcommand(cmd_val)) return run_validate(val_opts, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;  // unreachable: require_subcommand guarantees a dispatch
}

inline int run(int argc, const char* const* argv) {
    return run(argc, argv, std::cout, std::cerr);
}

}  // namespace affectfuse::cli
