#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "affectfuse/errors.hpp"
#include "affectfuse/fusion.hpp"
#include "affectfuse/labels.hpp"
#include "affectfuse/mapping.hpp"
#include "affectfuse/observation.hpp"

namespace affectfuse {

// ─── Window arithmetic ───────────────────────────────────────────────────────

/// Time-bucket geometry. stride == width gives tumbling windows,
/// stride < width sliding ones.
struct WindowSpec {
    std::int64_t width_ms = 5000;
    std::int64_t stride_ms = 5000;

    bool tumbling() const noexcept { return stride_ms == width_ms; }

    static WindowSpec tumbling(std::int64_t width) noexcept { return {width, width}; }
};

inline void validate_window_spec(const WindowSpec& spec) {
    if (spec.width_ms <= 0 || spec.stride_ms <= 0) {
        throw ConfigError("window width and stride must be positive");
    }
    if (spec.stride_ms > spec.width_ms) {
        throw ConfigError("window stride must not exceed width");
    }
}

namespace detail {

/// Largest multiple of stride that is <= ts. Timestamps are non-negative,
/// so plain integer division floors correctly.
inline std::int64_t floor_to_stride(std::int64_t ts, std::int64_t stride) noexcept {
    return (ts / stride) * stride;
}

}  // namespace detail

/// All observations of one student that fall in one window [start, start+width).
struct StudentWindow {
    std::string student_id;
    std::int64_t start_ms = 0;
    std::vector<Observation> observations;
};

/// Groups a time-ordered observation stream into per-student windows.
///
/// Each student's window grid starts at their first timestamp floored to a
/// multiple of stride and runs, stride by stride, through the last window
/// containing one of their observations; gap windows in between appear
/// empty. An observation belongs to every window [start, start+width)
/// containing its timestamp. Out-of-order timestamps are an error, never
/// silently re-sorted.
///
/// Output is ordered by student id, then window start.
inline std::vector<StudentWindow> window_stream(std::span<const Observation> observations,
                                                const WindowSpec& spec) {
    validate_window_spec(spec);
    for (std::size_t i = 1; i < observations.size(); ++i) {
        if (observations[i].timestamp_ms < observations[i - 1].timestamp_ms) {
            throw UnsortedInputError(i, "observation stream is not sorted by timestamp at index " +
                                            std::to_string(i));
        }
    }

    // Partition per student, preserving arrival (= timestamp) order.
    std::map<std::string, std::vector<Observation>> per_student;
    for (const Observation& obs : observations) {
        per_student[obs.student_id].push_back(obs);
    }

    std::vector<StudentWindow> out;
    for (auto& [student, stream] : per_student) {
        const std::int64_t first = stream.front().timestamp_ms;
        const std::int64_t last = stream.back().timestamp_ms;
        const std::int64_t grid_start = detail::floor_to_stride(first, spec.stride_ms);
        const std::int64_t grid_last = detail::floor_to_stride(last, spec.stride_ms);
        std::size_t lo = 0;  // first observation with ts >= start
        for (std::int64_t start = grid_start; start <= grid_last; start += spec.stride_ms) {
            while (lo < stream.size() && stream[lo].timestamp_ms < start) ++lo;
            StudentWindow w{student, start, {}};
            for (std::size_t i = lo; i < stream.size(); ++i) {
                if (stream[i].timestamp_ms >= start + spec.width_ms) break;
                w.observations.push_back(stream[i]);
            }
            out.push_back(std::move(w));
        }
    }
    return out;
}

// ─── Representative selection ────────────────────────────────────────────────

/// Reduces one student-window to at most one label per cue: the modal
/// (most frequent) label wins; frequency ties go to the label seen latest;
/// a residual tie on both goes to the earlier label in the cue's order.
inline CueOutputs representative_per_cue(std::span<const Observation> window_observations) {
    CueOutputs outputs;
    for (CueKind cue : kCues) {
        const std::size_t n = label_space_size(cue);
        std::vector<std::size_t> count(n, 0);
        std::vector<std::int64_t> last_ts(n, -1);
        bool any = false;
        for (const Observation& obs : window_observations) {
            if (obs.cue() != cue) continue;
            any = true;
            count[obs.label.index] += 1;
            last_ts[obs.label.index] = std::max(last_ts[obs.label.index], obs.timestamp_ms);
        }
        if (!any) continue;
        std::size_t best = 0;
        bool have_best = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (count[i] == 0) continue;
            if (!have_best || count[i] > count[best] ||
                (count[i] == count[best] && last_ts[i] > last_ts[best])) {
                best = i;
                have_best = true;
            }
        }
        outputs.set(CueLabel{cue, static_cast<std::uint8_t>(best)});
    }
    return outputs;
}

// ─── Timelines ───────────────────────────────────────────────────────────────

/// One fused window: the decision (or no-evidence) plus the full scores.
struct TimelineEntry {
    std::int64_t window_start_ms = 0;
    std::optional<EmotionLabel> emotion;  // nullopt marks no evidence
    EmotionScores scores;

    friend bool operator==(const TimelineEntry&, const TimelineEntry&) = default;
};

struct StudentTimeline {
    std::string student_id;
    std::vector<TimelineEntry> entries;  // consecutive starts differ by stride

    friend bool operator==(const StudentTimeline&, const StudentTimeline&) = default;
};

namespace detail {

/// Fuses one window's observations. A window that fails the require
/// policy, like one with no observations at all, reports no evidence.
inline TimelineEntry fuse_window(std::int64_t start, std::span<const Observation> observations,
                                 const FusionConfig& config, const MappingTable& table) {
    const CueOutputs outputs = representative_per_cue(observations);
    if (config.policy.kind == MissingCuePolicy::Kind::require &&
        outputs.present_count() < static_cast<std::size_t>(config.policy.min_cues)) {
        return {start, std::nullopt, EmotionScores{}};
    }
    EmotionScores scores = accumulate_scores(outputs, config, table);
    return {start, decide(scores, config.tie_break), std::move(scores)};
}

}  // namespace detail

/// Batch pipeline: windows the full sorted log, picks representatives,
/// fuses, and decides. Timelines come out ordered by student id.
inline std::vector<StudentTimeline> fuse_stream(std::span<const Observation> observations,
                                                const WindowSpec& spec,
                                                const FusionConfig& config,
                                                const MappingTable& table) {
    std::vector<StudentTimeline> timelines;
    for (StudentWindow& w : window_stream(observations, spec)) {
        if (timelines.empty() || timelines.back().student_id != w.student_id) {
            timelines.push_back({w.student_id, {}});
        }
        timelines.back().entries.push_back(
            detail::fuse_window(w.start_ms, w.observations, config, table));
    }
    return timelines;
}

/// Incremental counterpart of fuse_stream: push observations in timestamp
/// order, then finish(). Produces bit-identical timelines to the batch
/// path on the same log.
class StreamingFuser {
  public:
    StreamingFuser(WindowSpec spec, FusionConfig config, MappingTable table)
        : spec_(spec), config_(std::move(config)), table_(std::move(table)) {
        validate_window_spec(spec_);
        validate_config_or_throw();
    }

    void push(const Observation& obs) {
        if (count_ > 0 && obs.timestamp_ms < last_ts_) {
            throw UnsortedInputError(count_,
                                     "observation stream is not sorted by timestamp at index " +
                                         std::to_string(count_));
        }
        last_ts_ = obs.timestamp_ms;
        ++count_;

        State& st = students_[obs.student_id];
        if (!st.started) {
            st.started = true;
            st.next_start = detail::floor_to_stride(obs.timestamp_ms, spec_.stride_ms);
        }
        // Windows that can no longer receive observations are final.
        while (st.next_start + spec_.width_ms <= obs.timestamp_ms) {
            close_next_window(obs.student_id, st);
        }
        st.buffer.push_back(obs);
    }

    /// Flushes every open window and returns timelines ordered by student.
    std::vector<StudentTimeline> finish() {
        std::vector<StudentTimeline> out;
        for (auto& [student, st] : students_) {
            while (!st.buffer.empty()) close_next_window(student, st);
            out.push_back(std::move(st.timeline));
            out.back().student_id = student;
        }
        students_.clear();
        count_ = 0;
        return out;
    }

  private:
    struct State {
        bool started = false;
        std::int64_t next_start = 0;
        std::vector<Observation> buffer;  // ts >= next_start - width + 1
        StudentTimeline timeline;
    };

    void close_next_window(const std::string& student, State& st) {
        std::vector<Observation> in_window;
        for (const Observation& o : st.buffer) {
            if (o.timestamp_ms >= st.next_start &&
                o.timestamp_ms < st.next_start + spec_.width_ms) {
                in_window.push_back(o);
            }
        }
        st.timeline.entries.push_back(
            detail::fuse_window(st.next_start, in_window, config_, table_));
        st.next_start += spec_.stride_ms;
        std::erase_if(st.buffer,
                      [&](const Observation& o) { return o.timestamp_ms < st.next_start; });
        (void)student;
    }

    void validate_config_or_throw() const {
        const auto report = validate_config(config_);
        if (!report.ok()) {
            throw ConfigError("fusion config is invalid: " + report.findings.front().detail);
        }
        const auto mapping_report = validate_mapping(table_);
        if (!mapping_report.ok()) {
            throw ConfigError("mapping table is invalid: " +
                              mapping_report.findings.front().detail);
        }
    }

    WindowSpec spec_;
    FusionConfig config_;
    MappingTable table_;
    std::map<std::string, State> students_;
    std::size_t count_ = 0;
    std::int64_t last_ts_ = 0;
};

// ─── Classroom rollups ───────────────────────────────────────────────────────

/// The emotions counted as engaged; interested + neutral by default.
inline constexpr EmotionSet kDefaultEngagedSet{EmotionLabel::interested, EmotionLabel::neutral};

/// Per-window classroom aggregate: emotion counts over students with
/// evidence, the engaged share among them, and how many students had
/// no evidence at all. Counts sum to students-with-evidence.
struct ClassroomReport {
    std::int64_t window_start_ms = 0;
    std::array<std::uint64_t, kEmotionCount> counts{};
    std::size_t no_evidence_count = 0;
    double engagement_fraction = 0.0;  // 0 when no student has evidence

    std::uint64_t students_with_evidence() const noexcept {
        std::uint64_t n = 0;
        for (std::uint64_t c : counts) n += c;
        return n;
    }
};

/// Aggregates one window's per-student decisions.
inline ClassroomReport classroom_rollup(std::int64_t window_start,
                                        std::span<const std::optional<EmotionLabel>> decisions,
                                        EmotionSet engaged = kDefaultEngagedSet) {
    ClassroomReport report;
    report.window_start_ms = window_start;
    std::uint64_t engaged_count = 0;
    for (const auto& d : decisions) {
        if (!d) {
            report.no_evidence_count += 1;
            continue;
        }
        report.counts[static_cast<std::size_t>(*d)] += 1;
        if (engaged.contains(*d)) engaged_count += 1;
    }
    const std::uint64_t evidenced = report.students_with_evidence();
    report.engagement_fraction =
        evidenced > 0 ? static_cast<double>(engaged_count) / static_cast<double>(evidenced) : 0.0;
    return report;
}

/// Rolls a set of per-student timelines up into one report per window,
/// ordered by window start. A student counts toward a window only if
/// their timeline has an entry for it.
inline std::vector<ClassroomReport> rollup_timelines(std::span<const StudentTimeline> timelines,
                                                     EmotionSet engaged = kDefaultEngagedSet) {
    std::map<std::int64_t, std::vector<std::optional<EmotionLabel>>> per_window;
    for (const StudentTimeline& t : timelines) {
        for (const TimelineEntry& e : t.entries) {
            per_window[e.window_start_ms].push_back(e.emotion);
        }
    }
    std::vector<ClassroomReport> out;
    out.reserve(per_window.size());
    for (const auto& [start, decisions] : per_window) {
        out.push_back(classroom_rollup(start, decisions, engaged));
    }
    return out;
}

}  // namespace affectfuse
