#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affectfuse/errors.hpp"

namespace affectfuse {

// ─── Emotions ────────────────────────────────────────────────────────────────

/// The closed five-emotion vocabulary every module speaks.
/// Enumeration order is alphabetical and doubles as the deterministic
/// order for distribution argmax tie-breaks.
enum class EmotionLabel : std::uint8_t {
    bored,
    confused,
    frustrated,
    interested,
    neutral,
};

inline constexpr std::size_t kEmotionCount = 5;

inline constexpr std::array<EmotionLabel, kEmotionCount> kEmotions = {
    EmotionLabel::bored,      EmotionLabel::confused, EmotionLabel::frustrated,
    EmotionLabel::interested, EmotionLabel::neutral,
};

constexpr std::string_view to_string(EmotionLabel e) noexcept {
    switch (e) {
        case EmotionLabel::bored:      return "bored";
        case EmotionLabel::confused:   return "confused";
        case EmotionLabel::frustrated: return "frustrated";
        case EmotionLabel::interested: return "interested";
        case EmotionLabel::neutral:    return "neutral";
    }
    return "?";
}

namespace detail {

/// Case-insensitive ASCII comparison; label vocabularies are ASCII-only.
inline bool iequals(std::string_view a, std::string_view b) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

}  // namespace detail

/// Case-insensitive parse; returns nothing for any string outside the space.
inline std::optional<EmotionLabel> try_parse_emotion(std::string_view text) noexcept {
    for (EmotionLabel e : kEmotions) {
        if (detail::iequals(text, to_string(e))) return e;
    }
    return std::nullopt;
}

/// Case-insensitive parse of one of the five emotion labels.
/// Throws UnknownLabelError for anything else.
inline EmotionLabel parse_emotion(std::string_view text) {
    if (auto e = try_parse_emotion(text)) return *e;
    throw UnknownLabelError("unknown emotion label: \"" + std::string(text) + "\"");
}

// ─── Cues ────────────────────────────────────────────────────────────────────

/// The four observation channels. Enumeration order is the canonical
/// accumulation order used by the fusion scorer.
enum class CueKind : std::uint8_t {
    facial,
    speech,
    eye,
    posture,
};

inline constexpr std::size_t kCueCount = 4;

inline constexpr std::array<CueKind, kCueCount> kCues = {
    CueKind::facial, CueKind::speech, CueKind::eye, CueKind::posture,
};

constexpr std::string_view to_string(CueKind c) noexcept {
    switch (c) {
        case CueKind::facial:  return "facial";
        case CueKind::speech:  return "speech";
        case CueKind::eye:     return "eye";
        case CueKind::posture: return "posture";
    }
    return "?";
}

inline std::optional<CueKind> try_parse_cue(std::string_view text) noexcept {
    for (CueKind c : kCues) {
        if (detail::iequals(text, to_string(c))) return c;
    }
    return std::nullopt;
}

inline CueKind parse_cue(std::string_view text) {
    if (auto c = try_parse_cue(text)) return *c;
    throw UnknownLabelError("unknown cue: \"" + std::string(text) + "\"");
}

// ─── Per-cue label spaces ────────────────────────────────────────────────────

/// Eye-tracking output space (binary gaze classification).
enum class EyeLabel : std::uint8_t {
    looking_at_screen,
    looking_away,
};

/// Gesture-and-posture output space.
enum class PostureLabel : std::uint8_t {
    slouching,
    upright,
    writing,
};

constexpr std::string_view to_string(EyeLabel l) noexcept {
    switch (l) {
        case EyeLabel::looking_at_screen: return "looking_at_screen";
        case EyeLabel::looking_away:      return "looking_away";
    }
    return "?";
}

constexpr std::string_view to_string(PostureLabel l) noexcept {
    switch (l) {
        case PostureLabel::slouching: return "slouching";
        case PostureLabel::upright:   return "upright";
        case PostureLabel::writing:   return "writing";
    }
    return "?";
}

/// Number of labels in a cue's output space. Facial and speech classifiers
/// emit emotions directly; eye and posture have their own vocabularies.
constexpr std::size_t label_space_size(CueKind cue) noexcept {
    switch (cue) {
        case CueKind::facial:  return kEmotionCount;
        case CueKind::speech:  return kEmotionCount;
        case CueKind::eye:     return 2;
        case CueKind::posture: return 3;
    }
    return 0;
}

/// Name of the idx-th label of a cue's space, in the fixed documented order.
constexpr std::string_view label_name(CueKind cue, std::size_t idx) noexcept {
    switch (cue) {
        case CueKind::facial:
        case CueKind::speech:
            return to_string(static_cast<EmotionLabel>(idx));
        case CueKind::eye:
            return to_string(static_cast<EyeLabel>(idx));
        case CueKind::posture:
            return to_string(static_cast<PostureLabel>(idx));
    }
    return "?";
}

// ─── CueLabel ────────────────────────────────────────────────────────────────

/// One output label of one cue, stored as the cue plus the label's index
/// into that cue's fixed space. Cross-space labels cannot be represented.
struct CueLabel {
    CueKind cue;
    std::uint8_t index;

    std::string_view name() const noexcept { return label_name(cue, index); }

    friend constexpr bool operator==(CueLabel, CueLabel) noexcept = default;
};

inline CueLabel facial_label(EmotionLabel e) noexcept {
    return {CueKind::facial, static_cast<std::uint8_t>(e)};
}
inline CueLabel speech_label(EmotionLabel e) noexcept {
    return {CueKind::speech, static_cast<std::uint8_t>(e)};
}
inline CueLabel eye_label(EyeLabel l) noexcept {
    return {CueKind::eye, static_cast<std::uint8_t>(l)};
}
inline CueLabel posture_label(PostureLabel l) noexcept {
    return {CueKind::posture, static_cast<std::uint8_t>(l)};
}

/// The emotion a facial or speech label denotes; nothing for eye/posture.
inline std::optional<EmotionLabel> as_emotion(CueLabel l) noexcept {
    if (l.cue == CueKind::facial || l.cue == CueKind::speech) {
        return static_cast<EmotionLabel>(l.index);
    }
    return std::nullopt;
}

/// The full, fixed, documented-order label list for a cue.
inline std::vector<CueLabel> label_space(CueKind cue) {
    std::vector<CueLabel> out;
    out.reserve(label_space_size(cue));
    for (std::size_t i = 0; i < label_space_size(cue); ++i) {
        out.push_back({cue, static_cast<std::uint8_t>(i)});
    }
    return out;
}

inline std::optional<CueLabel> try_parse_cue_label(CueKind cue, std::string_view text) noexcept {
    for (std::size_t i = 0; i < label_space_size(cue); ++i) {
        if (detail::iequals(text, label_name(cue, i))) {
            return CueLabel{cue, static_cast<std::uint8_t>(i)};
        }
    }
    return std::nullopt;
}

/// Parse a label within the given cue's space. Labels from other spaces
/// are rejected, so a facial "slouching" never sneaks through.
inline CueLabel parse_cue_label(CueKind cue, std::string_view text) {
    if (auto l = try_parse_cue_label(cue, text)) return *l;
    throw UnknownLabelError("label \"" + std::string(text) + "\" is not in the " +
                            std::string(to_string(cue)) + " cue's space");
}

}  // namespace affectfuse
