#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "affectfuse/errors.hpp"
#include "affectfuse/labels.hpp"

namespace affectfuse {

/// Tolerance on the mass of a confidence distribution.
inline constexpr double kDistributionTolerance = 1e-6;

/// One timestamped cue output for one student. The carrier every other
/// module consumes. Immutable value; safe to share and send freely.
struct Observation {
    std::int64_t timestamp_ms = 0;  // milliseconds since epoch, >= 0
    std::string student_id;         // opaque, non-empty
    CueLabel label;                 // names its cue and the observed output
    /// Optional distribution over the cue's label space, in label order.
    /// When present its argmax (ties to the lower index) must equal label.
    std::optional<std::vector<double>> confidence;

    CueKind cue() const noexcept { return label.cue; }
};

/// Index of the largest entry; ties resolve to the lowest index,
/// matching each cue's declared label order.
inline std::size_t distribution_argmax(const std::vector<double>& dist) noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < dist.size(); ++i) {
        if (dist[i] > dist[best]) best = i;
    }
    return best;
}

/// Checks a probability vector over the given cue's space: correct length,
/// no negative mass, total within kDistributionTolerance of 1.
inline void validate_distribution(CueKind cue, const std::vector<double>& dist) {
    if (dist.size() != label_space_size(cue)) {
        throw BadDistributionError("distribution over " + std::string(to_string(cue)) +
                                   " must have " + std::to_string(label_space_size(cue)) +
                                   " entries, got " + std::to_string(dist.size()));
    }
    double sum = 0.0;
    for (double p : dist) {
        if (!(p >= 0.0)) {  // also rejects NaN
            throw BadDistributionError("distribution has negative or non-finite mass");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kDistributionTolerance) {
        throw BadDistributionError("distribution mass " + std::to_string(sum) +
                                   " is outside 1 +/- 1e-6");
    }
}

/// Enforces the Observation invariants. Throws Error subclasses on violation.
inline void validate_observation(const Observation& obs) {
    if (obs.timestamp_ms < 0) {
        throw Error("observation timestamp must be >= 0");
    }
    if (obs.student_id.empty()) {
        throw Error("observation student_id must be non-empty");
    }
    if (obs.label.index >= label_space_size(obs.cue())) {
        throw UnknownLabelError("observation label index out of range for cue " +
                                std::string(to_string(obs.cue())));
    }
    if (obs.confidence) {
        validate_distribution(obs.cue(), *obs.confidence);
        if (distribution_argmax(*obs.confidence) != obs.label.index) {
            throw Error("observation confidence argmax does not match its label");
        }
    }
}

}  // namespace affectfuse
