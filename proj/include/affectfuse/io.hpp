#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "affectfuse/errors.hpp"
#include "affectfuse/fusion.hpp"
#include "affectfuse/labels.hpp"
#include "affectfuse/mapping.hpp"
#include "affectfuse/metrics.hpp"
#include "affectfuse/observation.hpp"
#include "affectfuse/sessions.hpp"
#include "affectfuse/simulator.hpp"

namespace affectfuse {

using json = nlohmann::json;

// ─── Files and digests ───────────────────────────────────────────────────────

/// FNV-1a over the raw bytes; stable across platforms and runs.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 14695981039346656037ull;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

/// Digest string recorded in run manifests: "fnv1a64:" + 16 hex digits.
inline std::string content_digest(std::string_view bytes) {
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setfill('0') << std::setw(16) << fnv1a64(bytes);
    return os.str();
}

/// Writes via a sibling temp file plus rename, so a crash mid-write never
/// leaves a partial file under the final name.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace detail {

inline std::optional<std::string> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

inline std::optional<std::string> first_unknown_key(
    const json& obj, std::initializer_list<std::string_view> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (std::string_view a : allowed) known = known || item.key() == a;
        if (!known) return item.key();
    }
    return std::nullopt;
}

inline std::int64_t get_int64(const json& obj, const char* key, const char* what) {
    const json& v = obj.at(key);
    if (!v.is_number_integer()) {
        throw Error("\"" + std::string(key) + "\" in " + what + " must be an integer");
    }
    return v.get<std::int64_t>();
}

inline std::string get_string(const json& obj, const char* key, const char* what) {
    const json& v = obj.at(key);
    if (!v.is_string()) {
        throw Error("\"" + std::string(key) + "\" in " + what + " must be a string");
    }
    return v.get<std::string>();
}

inline void require_fields(const json& obj, std::initializer_list<const char*> fields,
                           const char* what) {
    for (const char* f : fields) {
        if (!obj.contains(f)) {
            throw Error(std::string(what) + " is missing required field \"" + f + "\"");
        }
    }
}

}  // namespace detail

// ─── Observation records ─────────────────────────────────────────────────────

/// JSONL observation object: ts, student, cue, label, optional confidence
/// as an object from label name to mass (omitted labels carry 0).
inline json observation_to_json(const Observation& obs) {
    json j;
    j["ts"] = obs.timestamp_ms;
    j["student"] = obs.student_id;
    j["cue"] = std::string(to_string(obs.cue()));
    j["label"] = std::string(obs.label.name());
    if (obs.confidence) {
        json conf = json::object();
        for (std::size_t i = 0; i < obs.confidence->size(); ++i) {
            conf[std::string(label_name(obs.cue(), i))] = (*obs.confidence)[i];
        }
        j["confidence"] = conf;
    }
    return j;
}

/// Parses and fully validates one observation object. Unknown fields and
/// cross-space labels are rejected. Throws Error subclasses; the JSONL
/// reader adds line numbers.
inline Observation observation_from_json(const json& j) {
    if (!j.is_object()) throw Error("observation must be a JSON object");
    if (auto k = detail::first_unknown_key(j, {"ts", "student", "cue", "label", "confidence"})) {
        throw Error("unknown observation field \"" + *k + "\"");
    }
    detail::require_fields(j, {"ts", "student", "cue", "label"}, "observation");

    Observation obs;
    obs.timestamp_ms = detail::get_int64(j, "ts", "observation");
    obs.student_id = detail::get_string(j, "student", "observation");
    const CueKind cue = parse_cue(detail::get_string(j, "cue", "observation"));
    obs.label = parse_cue_label(cue, detail::get_string(j, "label", "observation"));

    if (j.contains("confidence")) {
        const json& conf = j.at("confidence");
        if (!conf.is_object()) {
            throw Error("\"confidence\" must be an object from label name to number");
        }
        std::vector<double> dist(label_space_size(cue), 0.0);
        for (const auto& item : conf.items()) {
            const auto label = try_parse_cue_label(cue, item.key());
            if (!label) {
                throw UnknownLabelError("confidence key \"" + item.key() +
                                        "\" is not in the " + std::string(to_string(cue)) +
                                        " cue's space");
            }
            if (!item.value().is_number()) {
                throw Error("confidence for \"" + item.key() + "\" must be a number");
            }
            dist[label->index] = item.value().get<double>();
        }
        obs.confidence = std::move(dist);
    }
    validate_observation(obs);
    return obs;
}

/// Reads observation JSONL. Blank lines are allowed; any malformed line
/// aborts with its 1-based line number.
inline std::vector<Observation> read_observations_jsonl(std::istream& in) {
    std::vector<Observation> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(observation_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw InputFormatError(line_no,
                                   "line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw InputFormatError(line_no,
                                   "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<Observation> load_observations(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputFormatError(0, "cannot read observations file: " + path.string());
    return read_observations_jsonl(in);
}

inline std::string observations_to_jsonl(std::span<const Observation> observations) {
    std::string out;
    for (const Observation& o : observations) {
        out += observation_to_json(o).dump();
        out += '\n';
    }
    return out;
}

// ─── Ground-truth records ────────────────────────────────────────────────────

inline json ground_truth_to_json(const GroundTruthRecord& r) {
    json j;
    j["ts"] = r.timestamp_ms;
    j["student"] = r.student_id;
    j["emotion"] = std::string(to_string(r.emotion));
    return j;
}

inline GroundTruthRecord ground_truth_from_json(const json& j) {
    if (!j.is_object()) throw Error("ground-truth record must be a JSON object");
    if (auto k = detail::first_unknown_key(j, {"ts", "student", "emotion"})) {
        throw Error("unknown ground-truth field \"" + *k + "\"");
    }
    detail::require_fields(j, {"ts", "student", "emotion"}, "ground-truth record");
    GroundTruthRecord r;
    r.timestamp_ms = detail::get_int64(j, "ts", "ground-truth record");
    r.student_id = detail::get_string(j, "student", "ground-truth record");
    r.emotion = parse_emotion(detail::get_string(j, "emotion", "ground-truth record"));
    if (r.timestamp_ms < 0) throw Error("ground-truth timestamp must be >= 0");
    if (r.student_id.empty()) throw Error("ground-truth student must be non-empty");
    return r;
}

inline std::vector<GroundTruthRecord> read_ground_truth_jsonl(std::istream& in) {
    std::vector<GroundTruthRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(ground_truth_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw InputFormatError(line_no,
                                   "line " + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            throw InputFormatError(line_no,
                                   "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<GroundTruthRecord> load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputFormatError(0, "cannot read ground-truth file: " + path.string());
    return read_ground_truth_jsonl(in);
}

inline std::string ground_truth_to_jsonl(std::span<const GroundTruthRecord> records) {
    std::string out;
    for (const GroundTruthRecord& r : records) {
        out += ground_truth_to_json(r).dump();
        out += '\n';
    }
    return out;
}

// ─── Timeline and rollup reports ─────────────────────────────────────────────

/// One timeline line: student, window_start, fused emotion (null marks a
/// window without evidence), and the full score vector.
inline json timeline_entry_to_json(std::string_view student, const TimelineEntry& e) {
    json j;
    j["student"] = std::string(student);
    j["window_start"] = e.window_start_ms;
    if (e.emotion) {
        j["emotion"] = std::string(to_string(*e.emotion));
    } else {
        j["emotion"] = nullptr;
    }
    json scores = json::object();
    for (EmotionLabel em : kEmotions) {
        scores[std::string(to_string(em))] = e.scores[em];
    }
    j["scores"] = scores;
    return j;
}

inline std::string timelines_to_jsonl(std::span<const StudentTimeline> timelines) {
    std::string out;
    for (const StudentTimeline& t : timelines) {
        for (const TimelineEntry& e : t.entries) {
            out += timeline_entry_to_json(t.student_id, e).dump();
            out += '\n';
        }
    }
    return out;
}

inline json rollup_to_json(const ClassroomReport& r) {
    json j;
    j["window_start"] = r.window_start_ms;
    json counts = json::object();
    for (EmotionLabel e : kEmotions) {
        counts[std::string(to_string(e))] = r.counts[static_cast<std::size_t>(e)];
    }
    j["counts"] = counts;
    j["no_evidence"] = r.no_evidence_count;
    j["engagement"] = r.engagement_fraction;
    return j;
}

inline std::string rollups_to_jsonl(std::span<const ClassroomReport> reports) {
    std::string out;
    for (const ClassroomReport& r : reports) {
        out += rollup_to_json(r).dump();
        out += '\n';
    }
    return out;
}

/// Aligned text rendering of per-student timelines. Scores print with four
/// decimals; the JSONL form is the lossless one.
inline std::string format_timelines(std::span<const StudentTimeline> timelines) {
    std::size_t student_width = 7;  // "student"
    for (const StudentTimeline& t : timelines) {
        student_width = std::max(student_width, t.student_id.size());
    }
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(student_width)) << "student" << std::right
       << " " << std::setw(12) << "window_start"
       << " " << std::setw(11) << "emotion";
    for (EmotionLabel e : kEmotions) os << " " << std::setw(10) << to_string(e);
    os << "\n";
    os << std::fixed << std::setprecision(4);
    for (const StudentTimeline& t : timelines) {
        for (const TimelineEntry& e : t.entries) {
            os << std::left << std::setw(static_cast<int>(student_width)) << t.student_id
               << std::right << " " << std::setw(12) << e.window_start_ms << " "
               << std::setw(11) << (e.emotion ? to_string(*e.emotion) : "-");
            for (EmotionLabel em : kEmotions) os << " " << std::setw(10) << e.scores[em];
            os << "\n";
        }
    }
    return std::move(os).str();
}

inline std::string format_rollups(std::span<const ClassroomReport> reports) {
    std::ostringstream os;
    os << std::setw(12) << "window_start";
    for (EmotionLabel e : kEmotions) os << " " << std::setw(10) << to_string(e);
    os << " " << std::setw(11) << "no_evidence"
       << " " << std::setw(10) << "engagement" << "\n";
    os << std::fixed << std::setprecision(4);
    for (const ClassroomReport& r : reports) {
        os << std::setw(12) << r.window_start_ms;
        for (EmotionLabel e : kEmotions) {
            os << " " << std::setw(10) << r.counts[static_cast<std::size_t>(e)];
        }
        os << " " << std::setw(11) << r.no_evidence_count << " " << std::setw(10)
           << r.engagement_fraction << "\n";
    }
    return std::move(os).str();
}

// ─── Confusion-matrix export ─────────────────────────────────────────────────

/// JSON form: {"label_space": [...], "counts": [[...], ...]} with counts
/// row-major, rows = predicted.
inline json matrix_to_json(const ConfusionMatrix& m) {
    json j;
    j["label_space"] = m.labels();
    json rows = json::array();
    for (std::size_t p = 0; p < m.size(); ++p) {
        json row = json::array();
        for (std::size_t a = 0; a < m.size(); ++a) row.push_back(m.at(p, a));
        rows.push_back(std::move(row));
    }
    j["counts"] = std::move(rows);
    return j;
}

// ─── Mapping config ──────────────────────────────────────────────────────────

/// Mapping config document: object keyed by cue name, each value an object
/// keyed by cue label, each value an array of emotion strings. A loaded
/// file fully replaces the default table, so omissions become missing
/// entries that validation reports.
inline MappingTable mapping_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("mapping config must be a JSON object");
    MappingTable table = MappingTable::empty_skeleton();
    for (const auto& cue_item : j.items()) {
        const auto cue = try_parse_cue(cue_item.key());
        if (!cue) throw ConfigError("unknown cue \"" + cue_item.key() + "\" in mapping config");
        if (!cue_item.value().is_object()) {
            throw ConfigError("mapping for cue " + cue_item.key() +
                              " must be an object from label to emotion array");
        }
        for (const auto& label_item : cue_item.value().items()) {
            const auto label = try_parse_cue_label(*cue, label_item.key());
            if (!label) {
                throw ConfigError("label \"" + label_item.key() + "\" is not in the " +
                                  cue_item.key() + " cue's space");
            }
            if (!label_item.value().is_array()) {
                throw ConfigError("mapping entry " + cue_item.key() + "/" + label_item.key() +
                                  " must be an array of emotion strings");
            }
            EmotionSet set;
            for (const json& e : label_item.value()) {
                if (!e.is_string()) {
                    throw ConfigError("mapping entry " + cue_item.key() + "/" +
                                      label_item.key() + " must contain emotion strings");
                }
                const auto emotion = try_parse_emotion(e.get<std::string>());
                if (!emotion) {
                    throw ConfigError("unknown emotion \"" + e.get<std::string>() +
                                      "\" in mapping entry " + cue_item.key() + "/" +
                                      label_item.key());
                }
                set.insert(*emotion);
            }
            table.set(*cue, label->index, set);
        }
    }
    return table;
}

inline json mapping_to_json(const MappingTable& table) {
    json j = json::object();
    for (CueKind cue : kCues) {
        json labels = json::object();
        for (std::size_t i = 0; i < label_space_size(cue); ++i) {
            const auto& entry = table.entry(cue, static_cast<std::uint8_t>(i));
            if (!entry) continue;
            json arr = json::array();
            for (EmotionLabel e : entry->labels()) arr.push_back(std::string(to_string(e)));
            labels[std::string(label_name(cue, i))] = std::move(arr);
        }
        j[std::string(to_string(cue))] = std::move(labels);
    }
    return j;
}

inline MappingTable load_mapping(const std::filesystem::path& path) {
    const auto bytes = detail::read_file_bytes(path);
    if (!bytes) throw ConfigError("cannot read mapping config: " + path.string());
    try {
        return mapping_from_json(json::parse(*bytes));
    } catch (const json::exception& e) {
        throw ConfigError("mapping config " + path.string() + ": " + e.what());
    }
}

// ─── Fusion config ───────────────────────────────────────────────────────────

/// Fusion config document with keys cue_weights, sub_weights, tie_break,
/// missing_cue_policy. Omitted keys (including omitted cues and labels
/// inside the weight objects) keep their defaults; unknown keys are errors.
inline FusionConfig fusion_config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("fusion config must be a JSON object");
    if (auto k = detail::first_unknown_key(
            j, {"cue_weights", "sub_weights", "tie_break", "missing_cue_policy"})) {
        throw ConfigError("unknown fusion config key \"" + *k + "\"");
    }
    FusionConfig config = default_config();

    if (j.contains("cue_weights")) {
        const json& cw = j.at("cue_weights");
        if (!cw.is_object()) throw ConfigError("cue_weights must be an object from cue to number");
        for (const auto& item : cw.items()) {
            const auto cue = try_parse_cue(item.key());
            if (!cue) throw ConfigError("unknown cue \"" + item.key() + "\" in cue_weights");
            if (!item.value().is_number()) {
                throw ConfigError("cue weight for " + item.key() + " must be a number");
            }
            config.cue_weights[static_cast<std::size_t>(*cue)] = item.value().get<double>();
        }
    }
    if (j.contains("sub_weights")) {
        const json& sw = j.at("sub_weights");
        if (!sw.is_object()) {
            throw ConfigError("sub_weights must be an object from cue to label weights");
        }
        for (const auto& cue_item : sw.items()) {
            const auto cue = try_parse_cue(cue_item.key());
            if (!cue) throw ConfigError("unknown cue \"" + cue_item.key() + "\" in sub_weights");
            if (!cue_item.value().is_object()) {
                throw ConfigError("sub_weights for " + cue_item.key() +
                                  " must be an object from label to number");
            }
            for (const auto& label_item : cue_item.value().items()) {
                const auto label = try_parse_cue_label(*cue, label_item.key());
                if (!label) {
                    throw ConfigError("label \"" + label_item.key() + "\" is not in the " +
                                      cue_item.key() + " cue's space");
                }
                if (!label_item.value().is_number()) {
                    throw ConfigError("sub-weight for " + cue_item.key() + "/" +
                                      label_item.key() + " must be a number");
                }
                config.sub_weights[static_cast<std::size_t>(*cue)][label->index] =
                    label_item.value().get<double>();
            }
        }
    }
    if (j.contains("tie_break")) {
        const json& tb = j.at("tie_break");
        if (!tb.is_array() || tb.size() != kEmotionCount) {
            throw ConfigError("tie_break must be an array of all five emotions");
        }
        for (std::size_t i = 0; i < kEmotionCount; ++i) {
            if (!tb[i].is_string()) throw ConfigError("tie_break entries must be strings");
            const auto e = try_parse_emotion(tb[i].get<std::string>());
            if (!e) {
                throw ConfigError("unknown emotion \"" + tb[i].get<std::string>() +
                                  "\" in tie_break");
            }
            config.tie_break[i] = *e;
        }
    }
    if (j.contains("missing_cue_policy")) {
        const json& p = j.at("missing_cue_policy");
        if (p.is_string()) {
            const std::string s = p.get<std::string>();
            if (s == "skip") {
                config.policy = MissingCuePolicy::skip();
            } else if (s == "renormalize") {
                config.policy = MissingCuePolicy::renormalize();
            } else {
                throw ConfigError("unknown missing_cue_policy \"" + s + "\"");
            }
        } else if (p.is_object()) {
            if (auto k = detail::first_unknown_key(p, {"require"})) {
                throw ConfigError("unknown missing_cue_policy key \"" + *k + "\"");
            }
            if (!p.contains("require") || !p.at("require").is_number_integer()) {
                throw ConfigError("missing_cue_policy object must be {\"require\": N}");
            }
            config.policy = MissingCuePolicy::require(p.at("require").get<int>());
        } else {
            throw ConfigError(
                "missing_cue_policy must be \"skip\", \"renormalize\", or {\"require\": N}");
        }
    }
    return config;
}

inline json fusion_config_to_json(const FusionConfig& config) {
    json j;
    json cw = json::object();
    json sw = json::object();
    for (CueKind cue : kCues) {
        cw[std::string(to_string(cue))] = config.cue_weight(cue);
        json labels = json::object();
        for (std::size_t i = 0; i < label_space_size(cue); ++i) {
            labels[std::string(label_name(cue, i))] =
                config.sub_weight(cue, static_cast<std::uint8_t>(i));
        }
        sw[std::string(to_string(cue))] = std::move(labels);
    }
    j["cue_weights"] = std::move(cw);
    j["sub_weights"] = std::move(sw);
    json tb = json::array();
    for (EmotionLabel e : config.tie_break) tb.push_back(std::string(to_string(e)));
    j["tie_break"] = std::move(tb);
    switch (config.policy.kind) {
        case MissingCuePolicy::Kind::skip:
            j["missing_cue_policy"] = "skip";
            break;
        case MissingCuePolicy::Kind::renormalize:
            j["missing_cue_policy"] = "renormalize";
            break;
        case MissingCuePolicy::Kind::require:
            j["missing_cue_policy"] = json{{"require", config.policy.min_cues}};
            break;
    }
    return j;
}

inline FusionConfig load_fusion_config(const std::filesystem::path& path) {
    const auto bytes = detail::read_file_bytes(path);
    if (!bytes) throw ConfigError("cannot read fusion config: " + path.string());
    try {
        return fusion_config_from_json(json::parse(*bytes));
    } catch (const json::exception& e) {
        throw ConfigError("fusion config " + path.string() + ": " + e.what());
    }
}

// ─── Simulation parameters ───────────────────────────────────────────────────

namespace detail {

inline std::uint64_t get_seed(const json& v) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError("seed must be a non-negative integer");
}

inline std::size_t get_count(const json& v, const char* key) {
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
        return static_cast<std::size_t>(v.get<std::int64_t>());
    }
    throw ConfigError(std::string(key) + " must be a non-negative integer");
}

inline std::array<double, kEmotionCount> get_emotion_distribution(const json& v,
                                                                  const char* key) {
    if (!v.is_array() || v.size() != kEmotionCount) {
        throw ConfigError(std::string(key) + " must be an array of " +
                          std::to_string(kEmotionCount) + " numbers in emotion order");
    }
    std::array<double, kEmotionCount> out{};
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
        if (!v[i].is_number()) {
            throw ConfigError(std::string(key) + " entries must be numbers");
        }
        out[i] = v[i].get<double>();
    }
    return out;
}

}  // namespace detail

/// Simulation parameter document: students, ticks, seed, step_ms,
/// transition (5x5 rows in emotion order), initial, emission (per cue a
/// number, or {"matrix": rows} over the cue's label space), dropout
/// (per cue a number). Omitted keys keep defaults; unknown keys are errors.
/// Shape and probability constraints are the validators' job, so their
/// findings surface as one consolidated report.
inline SimParams sim_params_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("simulation params must be a JSON object");
    if (auto k = detail::first_unknown_key(j, {"students", "ticks", "seed", "step_ms",
                                               "transition", "initial", "emission",
                                               "dropout"})) {
        throw ConfigError("unknown simulation params key \"" + *k + "\"");
    }
    SimParams params;
    if (j.contains("students")) params.students = detail::get_count(j.at("students"), "students");
    if (j.contains("ticks")) params.ticks = detail::get_count(j.at("ticks"), "ticks");
    if (j.contains("seed")) params.seed = detail::get_seed(j.at("seed"));
    if (j.contains("step_ms")) {
        const json& v = j.at("step_ms");
        if (!v.is_number_integer()) throw ConfigError("step_ms must be an integer");
        params.process.step_ms = v.get<std::int64_t>();
    }
    if (j.contains("transition")) {
        const json& t = j.at("transition");
        if (!t.is_array() || t.size() != kEmotionCount) {
            throw ConfigError("transition must be a 5x5 array with rows in emotion order");
        }
        for (std::size_t row = 0; row < kEmotionCount; ++row) {
            params.process.transition[row] =
                detail::get_emotion_distribution(t[row], "transition row");
        }
    }
    if (j.contains("initial")) {
        params.process.initial = detail::get_emotion_distribution(j.at("initial"), "initial");
    }
    if (j.contains("emission")) {
        const json& em = j.at("emission");
        if (!em.is_object()) {
            throw ConfigError("emission must be an object from cue to number or matrix");
        }
        for (const auto& item : em.items()) {
            const auto cue = try_parse_cue(item.key());
            if (!cue) throw ConfigError("unknown cue \"" + item.key() + "\" in emission");
            const json& v = item.value();
            if (v.is_number()) {
                params.emission.cue(*cue).accuracy = v.get<double>();
            } else if (v.is_object()) {
                if (auto k = detail::first_unknown_key(v, {"matrix"})) {
                    throw ConfigError("unknown emission key \"" + *k + "\" for cue " +
                                      item.key());
                }
                if (!v.contains("matrix") || !v.at("matrix").is_array()) {
                    throw ConfigError("emission matrix for " + item.key() +
                                      " must be {\"matrix\": rows}");
                }
                std::vector<std::vector<double>> matrix;
                for (const json& row : v.at("matrix")) {
                    if (!row.is_array()) {
                        throw ConfigError("emission matrix rows for " + item.key() +
                                          " must be arrays of numbers");
                    }
                    std::vector<double> r;
                    for (const json& cell : row) {
                        if (!cell.is_number()) {
                            throw ConfigError("emission matrix entries for " + item.key() +
                                              " must be numbers");
                        }
                        r.push_back(cell.get<double>());
                    }
                    matrix.push_back(std::move(r));
                }
                params.emission.cue(*cue).matrix = std::move(matrix);
            } else {
                throw ConfigError("emission for " + item.key() +
                                  " must be a number or {\"matrix\": rows}");
            }
        }
    }
    if (j.contains("dropout")) {
        const json& dr = j.at("dropout");
        if (!dr.is_object()) throw ConfigError("dropout must be an object from cue to number");
        for (const auto& item : dr.items()) {
            const auto cue = try_parse_cue(item.key());
            if (!cue) throw ConfigError("unknown cue \"" + item.key() + "\" in dropout");
            if (!item.value().is_number()) {
                throw ConfigError("dropout for " + item.key() + " must be a number");
            }
            params.emission.cue(*cue).dropout = item.value().get<double>();
        }
    }
    return params;
}

inline SimParams load_sim_params(const std::filesystem::path& path) {
    const auto bytes = detail::read_file_bytes(path);
    if (!bytes) throw ConfigError("cannot read simulation params: " + path.string());
    try {
        return sim_params_from_json(json::parse(*bytes));
    } catch (const json::exception& e) {
        throw ConfigError("simulation params " + path.string() + ": " + e.what());
    }
}

}  // namespace affectfuse
