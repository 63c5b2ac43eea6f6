#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "affectfuse/errors.hpp"
#include "affectfuse/labels.hpp"
#include "affectfuse/mapping.hpp"
#include "affectfuse/observation.hpp"

namespace affectfuse {

// ─── Configuration ───────────────────────────────────────────────────────────

/// What to do when a window is missing some cues.
///   skip        — absent cues contribute nothing
///   renormalize — present cue weights are scaled by
///                 (sum of all weights) / (sum of present weights)
///   require     — fewer than min_cues present is an error
struct MissingCuePolicy {
    enum class Kind : std::uint8_t { skip, renormalize, require };

    Kind kind = Kind::skip;
    int min_cues = 1;  // meaningful only for require

    static constexpr MissingCuePolicy skip() noexcept { return {Kind::skip, 1}; }
    static constexpr MissingCuePolicy renormalize() noexcept { return {Kind::renormalize, 1}; }
    static constexpr MissingCuePolicy require(int min_cues) noexcept {
        return {Kind::require, min_cues};
    }

    friend constexpr bool operator==(MissingCuePolicy, MissingCuePolicy) noexcept = default;
};

/// Fixed emotion precedence resolving equal maximal scores.
using TieBreak = std::array<EmotionLabel, kEmotionCount>;

inline constexpr TieBreak kDefaultTieBreak = {
    EmotionLabel::neutral, EmotionLabel::interested, EmotionLabel::bored,
    EmotionLabel::confused, EmotionLabel::frustrated,
};

/// Cue weights, per-output sub-weights, tie-break order, missing-cue policy.
struct FusionConfig {
    /// W_i, indexed by CueKind. Non-negative; at least one strictly positive.
    std::array<double, kCueCount> cue_weights{};
    /// w_{i,j}, indexed by cue then label index; total over each cue's space.
    std::array<std::vector<double>, kCueCount> sub_weights;
    TieBreak tie_break = kDefaultTieBreak;
    MissingCuePolicy policy = MissingCuePolicy::skip();

    double cue_weight(CueKind c) const noexcept {
        return cue_weights[static_cast<std::size_t>(c)];
    }
    double sub_weight(CueKind c, std::uint8_t idx) const {
        return sub_weights[static_cast<std::size_t>(c)][idx];
    }
};

/// The shipped defaults. Cue weights are the per-cue classifier accuracies
/// rounded to two decimals; no eye accuracy is reported anywhere, so eye
/// carries a documented 0.90 placeholder. All sub-weights are 1, the
/// tie-break leads with neutral, and absent cues are skipped.
inline FusionConfig default_config() {
    FusionConfig c;
    c.cue_weights[static_cast<std::size_t>(CueKind::facial)] = 0.65;
    c.cue_weights[static_cast<std::size_t>(CueKind::speech)] = 0.73;
    c.cue_weights[static_cast<std::size_t>(CueKind::eye)] = 0.90;
    c.cue_weights[static_cast<std::size_t>(CueKind::posture)] = 0.96;
    for (CueKind cue : kCues) {
        c.sub_weights[static_cast<std::size_t>(cue)].assign(label_space_size(cue), 1.0);
    }
    c.tie_break = kDefaultTieBreak;
    c.policy = MissingCuePolicy::skip();
    return c;
}

struct ConfigFinding {
    std::string detail;
};

struct ConfigValidation {
    std::vector<ConfigFinding> findings;
    bool ok() const noexcept { return findings.empty(); }
};

/// Checks the FusionConfig invariants: non-negative finite weights with at
/// least one positive cue weight, total sub-weights, a tie-break that is a
/// permutation of all five emotions, and a require count in 1..4.
inline ConfigValidation validate_config(const FusionConfig& config) {
    ConfigValidation report;
    double positive = 0.0;
    for (CueKind cue : kCues) {
        const double w = config.cue_weight(cue);
        if (!(w >= 0.0) || !std::isfinite(w)) {
            report.findings.push_back({"cue weight for " + std::string(to_string(cue)) +
                                       " must be a non-negative finite number"});
        } else {
            positive += w;
        }
    }
    if (positive <= 0.0) {
        report.findings.push_back({"at least one cue weight must be strictly positive"});
    }
    for (CueKind cue : kCues) {
        const auto& sw = config.sub_weights[static_cast<std::size_t>(cue)];
        if (sw.size() != label_space_size(cue)) {
            report.findings.push_back({"sub-weights for " + std::string(to_string(cue)) +
                                       " must cover all " +
                                       std::to_string(label_space_size(cue)) + " labels"});
            continue;
        }
        for (std::size_t i = 0; i < sw.size(); ++i) {
            if (!(sw[i] >= 0.0) || !std::isfinite(sw[i])) {
                report.findings.push_back(
                    {"sub-weight for " + std::string(to_string(cue)) + "/" +
                     std::string(label_name(cue, i)) +
                     " must be a non-negative finite number"});
            }
        }
    }
    EmotionSet seen;
    for (EmotionLabel e : config.tie_break) seen.insert(e);
    if (seen.size() != kEmotionCount) {
        report.findings.push_back({"tie_break must be a permutation of all five emotions"});
    }
    if (config.policy.kind == MissingCuePolicy::Kind::require &&
        (config.policy.min_cues < 1 || config.policy.min_cues > static_cast<int>(kCueCount))) {
        report.findings.push_back({"require policy min_cues must be in 1..4"});
    }
    return report;
}

// ─── Window inputs ───────────────────────────────────────────────────────────

/// A set over the four cues, packed into one byte.
class CueSet {
  public:
    constexpr CueSet() = default;

    constexpr CueSet& insert(CueKind c) noexcept {
        bits_ |= bit(c);
        return *this;
    }
    constexpr bool contains(CueKind c) const noexcept { return (bits_ & bit(c)) != 0; }
    constexpr bool empty() const noexcept { return bits_ == 0; }
    constexpr std::size_t size() const noexcept {
        std::size_t n = 0;
        for (CueKind c : kCues) n += contains(c) ? 1 : 0;
        return n;
    }

    friend constexpr bool operator==(CueSet, CueSet) noexcept = default;

  private:
    static constexpr std::uint8_t bit(CueKind c) noexcept {
        return static_cast<std::uint8_t>(1u << static_cast<std::uint8_t>(c));
    }
    std::uint8_t bits_ = 0;
};

/// At most one hard output label per cue — the per-window fusion input.
struct CueOutputs {
    std::array<std::optional<std::uint8_t>, kCueCount> label_index;

    CueOutputs& set(CueLabel label) noexcept {
        label_index[static_cast<std::size_t>(label.cue)] = label.index;
        return *this;
    }
    std::optional<CueLabel> get(CueKind cue) const noexcept {
        const auto& idx = label_index[static_cast<std::size_t>(cue)];
        if (!idx) return std::nullopt;
        return CueLabel{cue, *idx};
    }
    bool present(CueKind cue) const noexcept {
        return label_index[static_cast<std::size_t>(cue)].has_value();
    }
    std::size_t present_count() const noexcept {
        std::size_t n = 0;
        for (const auto& idx : label_index) n += idx.has_value() ? 1 : 0;
        return n;
    }
};

/// At most one confidence distribution per cue, each over its label space.
struct CueDistributions {
    std::array<std::optional<std::vector<double>>, kCueCount> dist;

    CueDistributions& set(CueKind cue, std::vector<double> d) {
        dist[static_cast<std::size_t>(cue)] = std::move(d);
        return *this;
    }
    bool present(CueKind cue) const noexcept {
        return dist[static_cast<std::size_t>(cue)].has_value();
    }
    std::size_t present_count() const noexcept {
        std::size_t n = 0;
        for (const auto& d : dist) n += d.has_value() ? 1 : 0;
        return n;
    }
};

// ─── Scores ──────────────────────────────────────────────────────────────────

/// Non-negative score per emotion for one student-window; argmax decides.
/// If contributing is empty, every score is zero.
struct EmotionScores {
    std::array<double, kEmotionCount> score{};
    CueSet contributing;

    double& operator[](EmotionLabel e) noexcept {
        return score[static_cast<std::size_t>(e)];
    }
    double operator[](EmotionLabel e) const noexcept {
        return score[static_cast<std::size_t>(e)];
    }

    friend bool operator==(const EmotionScores&, const EmotionScores&) = default;
};

namespace detail {

inline void check_policy(std::size_t present, MissingCuePolicy policy) {
    if (policy.kind == MissingCuePolicy::Kind::require &&
        present < static_cast<std::size_t>(policy.min_cues)) {
        throw InsufficientCuesError("policy requires at least " +
                                    std::to_string(policy.min_cues) + " cues, got " +
                                    std::to_string(present));
    }
}

/// Weight multiplier shared by both fusion paths. Under renormalize, each
/// present cue weight is scaled by (sum over all cues) / (sum over present),
/// a uniform positive factor that leaves the argmax unchanged.
template <typename PresentFn>
inline double renorm_factor(const FusionConfig& config, PresentFn&& present) {
    if (config.policy.kind != MissingCuePolicy::Kind::renormalize) return 1.0;
    double total = 0.0;
    double present_sum = 0.0;
    for (CueKind cue : kCues) {
        total += config.cue_weight(cue);
        if (present(cue)) present_sum += config.cue_weight(cue);
    }
    return present_sum > 0.0 ? total / present_sum : 1.0;
}

}  // namespace detail

// ─── Operations ──────────────────────────────────────────────────────────────

/// The weighted-majority scorer over hard labels. For each present cue i
/// with output j, adds W_i * w_{i,j} to every emotion in Map(i, j).
/// Cues accumulate in enumeration order, which makes results bit-stable.
inline EmotionScores accumulate_scores(const CueOutputs& outputs, const FusionConfig& config,
                                       const MappingTable& table) {
    detail::check_policy(outputs.present_count(), config.policy);
    const double factor =
        detail::renorm_factor(config, [&](CueKind c) { return outputs.present(c); });

    EmotionScores result;
    for (CueKind cue : kCues) {
        const auto label = outputs.get(cue);
        if (!label) continue;
        result.contributing.insert(cue);
        double weight = config.cue_weight(cue);
        if (factor != 1.0) weight = weight * factor;
        const double term = weight * config.sub_weight(cue, label->index);
        const EmotionSet mapped = map_cue_output(cue, *label, table);
        for (EmotionLabel e : kEmotions) {
            if (mapped.contains(e)) result[e] += term;
        }
    }
    return result;
}

/// The soft-output generalization: each present cue contributes
/// W_i * sum_j p_j * w_{i,j} for every emotion in Map(i, j). On one-hot
/// inputs this is bit-identical to accumulate_scores — terms with zero
/// mass are skipped, so the surviving arithmetic is the hard-label path's.
inline EmotionScores fuse_distributions(const CueDistributions& inputs,
                                        const FusionConfig& config,
                                        const MappingTable& table) {
    detail::check_policy(inputs.present_count(), config.policy);
    for (CueKind cue : kCues) {
        const auto& d = inputs.dist[static_cast<std::size_t>(cue)];
        if (d) validate_distribution(cue, *d);
    }
    const double factor =
        detail::renorm_factor(config, [&](CueKind c) { return inputs.present(c); });

    EmotionScores result;
    for (CueKind cue : kCues) {
        const auto& d = inputs.dist[static_cast<std::size_t>(cue)];
        if (!d) continue;
        result.contributing.insert(cue);
        double weight = config.cue_weight(cue);
        if (factor != 1.0) weight = weight * factor;

        std::array<double, kEmotionCount> cue_vector{};
        for (std::size_t j = 0; j < d->size(); ++j) {
            const double mass = (*d)[j];
            if (mass == 0.0) continue;
            const CueLabel label{cue, static_cast<std::uint8_t>(j)};
            const double term = mass * config.sub_weight(cue, label.index);
            const EmotionSet mapped = map_cue_output(cue, label, table);
            for (EmotionLabel e : kEmotions) {
                if (mapped.contains(e)) cue_vector[static_cast<std::size_t>(e)] += term;
            }
        }
        for (EmotionLabel e : kEmotions) {
            const double v = cue_vector[static_cast<std::size_t>(e)];
            if (v != 0.0) result[e] += weight * v;
        }
    }
    return result;
}

/// The final majority step: the emotion with the strictly greatest score;
/// among bit-equal maxima, the one earliest in tie_break. Returns nothing
/// when there is no evidence at all (no contributing cues, all scores zero).
inline std::optional<EmotionLabel> decide(const EmotionScores& scores,
                                          const TieBreak& tie_break) noexcept {
    double max_score = scores.score[0];
    for (std::size_t i = 1; i < kEmotionCount; ++i) {
        if (scores.score[i] > max_score) max_score = scores.score[i];
    }
    if (scores.contributing.empty() && max_score == 0.0) {
        bool all_zero = true;
        for (double s : scores.score) all_zero = all_zero && s == 0.0;
        if (all_zero) return std::nullopt;
    }
    for (EmotionLabel e : tie_break) {
        if (scores[e] == max_score) return e;
    }
    return tie_break[0];  // unreachable for well-formed tie_break
}

}  // namespace affectfuse
