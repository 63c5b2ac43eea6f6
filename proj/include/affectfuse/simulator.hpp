#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "affectfuse/errors.hpp"
#include "affectfuse/fusion.hpp"
#include "affectfuse/labels.hpp"
#include "affectfuse/mapping.hpp"
#include "affectfuse/metrics.hpp"
#include "affectfuse/observation.hpp"
#include "affectfuse/rng.hpp"
#include "affectfuse/sessions.hpp"

namespace affectfuse {

// ─── Ground-truth process ────────────────────────────────────────────────────

/// First-order Markov chain over the five emotions, sampled every step_ms.
struct GroundTruthProcess {
    /// Row-stochastic; transition[from][to], both in emotion order.
    std::array<std::array<double, kEmotionCount>, kEmotionCount> transition{};
    std::array<double, kEmotionCount> initial{};
    std::int64_t step_ms = 5000;
};

/// Sticky uniform chain: stay with 0.85, move to each other emotion with
/// 0.0375, start uniformly.
inline GroundTruthProcess default_process() {
    GroundTruthProcess p;
    for (std::size_t from = 0; from < kEmotionCount; ++from) {
        for (std::size_t to = 0; to < kEmotionCount; ++to) {
            p.transition[from][to] = from == to ? 0.85 : 0.0375;
        }
    }
    p.initial.fill(0.2);
    p.step_ms = 5000;
    return p;
}

/// Checks non-negative entries, unit row sums and initial sum (within the
/// distribution tolerance), and a positive step.
inline ConfigValidation validate_process(const GroundTruthProcess& process) {
    ConfigValidation report;
    auto check_distribution = [&](std::span<const double> dist, const std::string& what) {
        double sum = 0.0;
        for (double p : dist) {
            if (!(p >= 0.0) || !std::isfinite(p)) {
                report.findings.push_back({what + " entries must be non-negative finite numbers"});
                return;
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > kDistributionTolerance) {
            report.findings.push_back({what + " must sum to 1"});
        }
    };
    for (std::size_t from = 0; from < kEmotionCount; ++from) {
        check_distribution(process.transition[from],
                           "transition row " + std::to_string(from) + " (" +
                               std::string(to_string(kEmotions[from])) + ")");
    }
    check_distribution(process.initial, "initial distribution");
    if (process.step_ms <= 0) {
        report.findings.push_back({"step_ms must be positive"});
    }
    return report;
}

// ─── Emission model ──────────────────────────────────────────────────────────

/// How one cue's classifier behaves per tick. Two modes:
///
///   accuracy — with probability dropout emit nothing; otherwise with
///   probability accuracy emit a uniformly chosen label that maps to the
///   true emotion, else a uniformly chosen label that does not.
///
///   matrix — an intended label mapping to the true emotion is chosen
///   uniformly, then the emitted label is drawn from that label's row.
///   The matrix is square over the cue's label space (row = intended,
///   column = emitted, rows sum to 1). Dropout applies the same way.
///
/// When no label of the cue maps to the true emotion, the intended label
/// falls back to uniform over the whole space; such draws are counted.
struct CueEmission {
    double accuracy = 1.0;
    double dropout = 0.0;
    std::optional<std::vector<std::vector<double>>> matrix;
};

struct EmissionModel {
    std::array<CueEmission, kCueCount> cues;

    CueEmission& cue(CueKind c) { return cues[static_cast<std::size_t>(c)]; }
    const CueEmission& cue(CueKind c) const { return cues[static_cast<std::size_t>(c)]; }
};

/// Accuracy-mode defaults matching the reported per-cue classifier
/// accuracies (eye carries the same 0.90 placeholder as its fusion
/// weight). Speech drops out most: utterances are sparse.
inline EmissionModel default_emission() {
    EmissionModel m;
    m.cue(CueKind::facial) = {0.6507, 0.2, std::nullopt};
    m.cue(CueKind::speech) = {0.7315, 0.5, std::nullopt};
    m.cue(CueKind::eye) = {0.90, 0.2, std::nullopt};
    m.cue(CueKind::posture) = {0.9596, 0.2, std::nullopt};
    return m;
}

/// Checks probabilities in [0, 1] and, per matrix, square shape over the
/// cue's label space with row-stochastic rows.
inline ConfigValidation validate_emission(const EmissionModel& model) {
    ConfigValidation report;
    for (CueKind cue : kCues) {
        const CueEmission& e = model.cue(cue);
        const std::string name{to_string(cue)};
        if (!(e.accuracy >= 0.0 && e.accuracy <= 1.0)) {
            report.findings.push_back({"accuracy for " + name + " must be in [0, 1]"});
        }
        if (!(e.dropout >= 0.0 && e.dropout <= 1.0)) {
            report.findings.push_back({"dropout for " + name + " must be in [0, 1]"});
        }
        if (!e.matrix) continue;
        const std::size_t n = label_space_size(cue);
        if (e.matrix->size() != n) {
            report.findings.push_back({"confusion matrix for " + name + " must have " +
                                       std::to_string(n) + " rows"});
            continue;
        }
        for (std::size_t row = 0; row < n; ++row) {
            const auto& r = (*e.matrix)[row];
            if (r.size() != n) {
                report.findings.push_back({"confusion matrix row for " + name + "/" +
                                           std::string(label_name(cue, row)) + " must have " +
                                           std::to_string(n) + " columns"});
                continue;
            }
            double sum = 0.0;
            bool bad = false;
            for (double p : r) {
                if (!(p >= 0.0) || !std::isfinite(p)) bad = true;
                sum += p;
            }
            if (bad) {
                report.findings.push_back({"confusion matrix entries for " + name +
                                           " must be non-negative finite numbers"});
            } else if (std::abs(sum - 1.0) > kDistributionTolerance) {
                report.findings.push_back({"confusion matrix row for " + name + "/" +
                                           std::string(label_name(cue, row)) +
                                           " must sum to 1"});
            }
        }
    }
    return report;
}

// ─── Single-cue emission ─────────────────────────────────────────────────────

/// Label indices of the cue whose mapped emotion set contains the emotion.
inline std::vector<std::uint8_t> candidate_labels(CueKind cue, EmotionLabel emotion,
                                                  const MappingTable& table) {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < label_space_size(cue); ++i) {
        const auto& entry = table.entry(cue, i);
        if (entry && entry->contains(emotion)) {
            out.push_back(static_cast<std::uint8_t>(i));
        }
    }
    return out;
}

struct EmitResult {
    std::optional<CueLabel> label;   // nullopt when the cue dropped out
    bool used_fallback = false;      // no label of the cue maps to the emotion
};

/// One cue's draw for one tick. The draw sequence is fixed so streams stay
/// reproducible: dropout first (always one draw), then intended label, then
/// either the hit/miss coin plus a uniform pick, or the matrix row.
inline EmitResult emit(CueKind cue, EmotionLabel emotion, const CueEmission& emission,
                       const MappingTable& table, SplitMix64& rng) {
    if (rng.bernoulli(emission.dropout)) return {std::nullopt, false};

    const std::size_t n = label_space_size(cue);
    const std::vector<std::uint8_t> candidates = candidate_labels(cue, emotion, table);

    if (emission.matrix) {
        bool fallback = candidates.empty();
        const std::uint8_t intended =
            fallback ? static_cast<std::uint8_t>(rng.next_index(n))
                     : candidates[rng.next_index(candidates.size())];
        const std::size_t emitted = rng.next_categorical((*emission.matrix)[intended]);
        return {CueLabel{cue, static_cast<std::uint8_t>(emitted)}, fallback};
    }

    if (candidates.empty()) {
        return {CueLabel{cue, static_cast<std::uint8_t>(rng.next_index(n))}, true};
    }
    if (rng.bernoulli(emission.accuracy)) {
        return {CueLabel{cue, candidates[rng.next_index(candidates.size())]}, false};
    }
    std::vector<std::uint8_t> complement;
    for (std::size_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::uint8_t>(i);
        if (std::find(candidates.begin(), candidates.end(), idx) == candidates.end()) {
            complement.push_back(idx);
        }
    }
    // Every label maps to the emotion: a miss has nowhere else to land.
    const auto& pool = complement.empty() ? candidates : complement;
    return {CueLabel{cue, pool[rng.next_index(pool.size())]}, false};
}

// ─── Session generation ──────────────────────────────────────────────────────

struct GroundTruthRecord {
    std::int64_t timestamp_ms = 0;
    std::string student_id;
    EmotionLabel emotion = EmotionLabel::neutral;

    friend bool operator==(const GroundTruthRecord&, const GroundTruthRecord&) = default;
};

struct SimParams {
    std::size_t students = 10;
    std::size_t ticks = 100;
    std::uint64_t seed = 0;
    GroundTruthProcess process = default_process();
    EmissionModel emission = default_emission();
};

inline ConfigValidation validate_params(const SimParams& params) {
    ConfigValidation report;
    if (params.students == 0) report.findings.push_back({"students must be at least 1"});
    if (params.ticks == 0) report.findings.push_back({"ticks must be at least 1"});
    for (auto& f : validate_process(params.process).findings) report.findings.push_back(f);
    for (auto& f : validate_emission(params.emission).findings) report.findings.push_back(f);
    return report;
}

struct SimulatedSession {
    std::vector<Observation> observations;     // sorted by timestamp, then student
    std::vector<GroundTruthRecord> ground_truth;
    std::size_t fallback_count = 0;            // emissions with no candidate label
};

namespace detail {

inline std::string student_name(std::size_t index) {
    std::string digits = std::to_string(index);
    if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
    return "s" + digits;
}

}  // namespace detail

/// Generates a full session. Each student runs on an independent substream
/// of the seed, so adding students never perturbs existing ones. Ticks are
/// stamped at step midpoints; all four cues draw in enumeration order.
inline SimulatedSession generate(const SimParams& params, const MappingTable& table) {
    if (const auto report = validate_params(params); !report.ok()) {
        throw ConfigError("simulation parameters are invalid: " + report.findings.front().detail);
    }
    if (const auto report = validate_mapping(table); !report.ok()) {
        throw ConfigError("mapping table is invalid: " + report.findings.front().detail);
    }

    SimulatedSession session;
    const std::int64_t step = params.process.step_ms;
    for (std::size_t s = 0; s < params.students; ++s) {
        SplitMix64 rng = substream(params.seed, s);
        const std::string student = detail::student_name(s);
        std::size_t state = rng.next_categorical(params.process.initial);
        for (std::size_t t = 0; t < params.ticks; ++t) {
            if (t > 0) state = rng.next_categorical(params.process.transition[state]);
            const std::int64_t ts = static_cast<std::int64_t>(t) * step + step / 2;
            const EmotionLabel truth = kEmotions[state];
            session.ground_truth.push_back({ts, student, truth});
            for (CueKind cue : kCues) {
                const EmitResult r = emit(cue, truth, params.emission.cue(cue), table, rng);
                if (r.used_fallback) session.fallback_count += 1;
                if (r.label) {
                    session.observations.push_back({ts, student, *r.label, std::nullopt});
                }
            }
        }
    }
    std::stable_sort(
        session.observations.begin(), session.observations.end(),
        [](const Observation& a, const Observation& b) { return a.timestamp_ms < b.timestamp_ms; });
    std::stable_sort(session.ground_truth.begin(), session.ground_truth.end(),
                     [](const GroundTruthRecord& a, const GroundTruthRecord& b) {
                         return a.timestamp_ms < b.timestamp_ms;
                     });
    return session;
}

// ─── Evaluation against ground truth ─────────────────────────────────────────

/// Confusion matrices over emotions: one per cue alone, one for the fused
/// decision. A matrix records only ticks where its system produced an
/// answer, so summarize() gives accuracy over answered ticks. Systems
/// differ in how often they answer (dropout, missing-cue policy), which is
/// why the report also derives a session accuracy on the one denominator
/// they share: all ground-truth ticks, unanswered ticks counting as
/// misses. That is the number fusion is judged by.
struct EvaluationReport {
    std::array<ConfusionMatrix, kCueCount> per_cue;
    ConfusionMatrix fused;
    std::size_t truth_count = 0;      // ground-truth ticks evaluated
    std::size_t fused_undecided = 0;  // truth ticks without a fused decision

    EvaluationReport()
        : per_cue{ConfusionMatrix::over_emotions(), ConfusionMatrix::over_emotions(),
                  ConfusionMatrix::over_emotions(), ConfusionMatrix::over_emotions()},
          fused(ConfusionMatrix::over_emotions()) {}

    const ConfusionMatrix& for_cue(CueKind c) const {
        return per_cue[static_cast<std::size_t>(c)];
    }

    /// Correct answers divided by all ground-truth ticks.
    double session_accuracy(const ConfusionMatrix& m) const {
        if (truth_count == 0) return 0.0;
        return static_cast<double>(m.trace()) / static_cast<double>(truth_count);
    }
    double cue_session_accuracy(CueKind c) const { return session_accuracy(for_cue(c)); }
    double fused_session_accuracy() const { return session_accuracy(fused); }
};

/// Scores observations against ground truth joined on (student, timestamp).
/// Each cue's baseline fuses that cue alone (absent cues skipped); the
/// fused column uses the given config end to end. Multiple observations
/// of one cue at one tick reduce by the usual representative rule.
inline EvaluationReport evaluate(std::span<const Observation> observations,
                                 std::span<const GroundTruthRecord> ground_truth,
                                 const FusionConfig& config, const MappingTable& table) {
    std::map<std::pair<std::string, std::int64_t>, std::vector<Observation>> groups;
    for (const Observation& o : observations) {
        groups[{o.student_id, o.timestamp_ms}].push_back(o);
    }

    FusionConfig single = config;
    single.policy = MissingCuePolicy::skip();

    EvaluationReport report;
    const std::vector<Observation> no_observations;
    for (const GroundTruthRecord& truth : ground_truth) {
        ++report.truth_count;
        const auto it = groups.find({truth.student_id, truth.timestamp_ms});
        const auto& group = it != groups.end() ? it->second : no_observations;
        const CueOutputs outputs = representative_per_cue(group);
        const auto actual = static_cast<std::size_t>(truth.emotion);

        for (CueKind cue : kCues) {
            const auto label = outputs.get(cue);
            if (!label) continue;
            CueOutputs alone;
            alone.set(*label);
            const auto pred = decide(accumulate_scores(alone, single, table), config.tie_break);
            report.per_cue[static_cast<std::size_t>(cue)].record_by_index(
                static_cast<std::size_t>(*pred), actual);
        }

        std::optional<EmotionLabel> fused_pred;
        if (config.policy.kind != MissingCuePolicy::Kind::require ||
            outputs.present_count() >= static_cast<std::size_t>(config.policy.min_cues)) {
            fused_pred = decide(accumulate_scores(outputs, config, table), config.tie_break);
        }
        if (fused_pred) {
            report.fused.record_by_index(static_cast<std::size_t>(*fused_pred), actual);
        } else {
            report.fused_undecided += 1;
        }
    }
    return report;
}

}  // namespace affectfuse
