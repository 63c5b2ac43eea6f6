#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "affectfuse/errors.hpp"
#include "affectfuse/labels.hpp"

namespace affectfuse {

// ─── EmotionSet ──────────────────────────────────────────────────────────────

/// A set over the five emotions, packed into one byte.
/// Iteration yields members in emotion enumeration order.
class EmotionSet {
  public:
    constexpr EmotionSet() = default;
    constexpr EmotionSet(std::initializer_list<EmotionLabel> labels) {
        for (EmotionLabel e : labels) insert(e);
    }

    constexpr EmotionSet& insert(EmotionLabel e) noexcept {
        bits_ |= bit(e);
        return *this;
    }
    constexpr bool contains(EmotionLabel e) const noexcept { return (bits_ & bit(e)) != 0; }
    constexpr bool empty() const noexcept { return bits_ == 0; }

    constexpr std::size_t size() const noexcept {
        std::size_t n = 0;
        for (EmotionLabel e : kEmotions) n += contains(e) ? 1 : 0;
        return n;
    }

    /// Members in emotion enumeration order.
    std::vector<EmotionLabel> labels() const {
        std::vector<EmotionLabel> out;
        for (EmotionLabel e : kEmotions) {
            if (contains(e)) out.push_back(e);
        }
        return out;
    }

    friend constexpr bool operator==(EmotionSet, EmotionSet) noexcept = default;

  private:
    static constexpr std::uint8_t bit(EmotionLabel e) noexcept {
        return static_cast<std::uint8_t>(1u << static_cast<std::uint8_t>(e));
    }
    std::uint8_t bits_ = 0;
};

// ─── FER 7-class remap ───────────────────────────────────────────────────────

/// The seven-emotion vocabulary of common upstream facial classifiers.
enum class Fer7Label : std::uint8_t {
    happy,
    sad,
    angry,
    afraid,
    surprise,
    disgust,
    neutral,
};

inline constexpr std::array<Fer7Label, 7> kFer7Labels = {
    Fer7Label::happy,    Fer7Label::sad,     Fer7Label::angry,  Fer7Label::afraid,
    Fer7Label::surprise, Fer7Label::disgust, Fer7Label::neutral,
};

constexpr std::string_view to_string(Fer7Label l) noexcept {
    switch (l) {
        case Fer7Label::happy:    return "happy";
        case Fer7Label::sad:      return "sad";
        case Fer7Label::angry:    return "angry";
        case Fer7Label::afraid:   return "afraid";
        case Fer7Label::surprise: return "surprise";
        case Fer7Label::disgust:  return "disgust";
        case Fer7Label::neutral:  return "neutral";
    }
    return "?";
}

inline Fer7Label parse_fer7(std::string_view text) {
    for (Fer7Label l : kFer7Labels) {
        if (detail::iequals(text, to_string(l))) return l;
    }
    throw UnknownLabelError("unknown 7-class facial label: \"" + std::string(text) + "\"");
}

/// Collapses the seven-class facial vocabulary onto the five classroom
/// emotions: happy/surprise -> interested, sad -> bored, angry/disgust ->
/// frustrated, afraid -> confused, neutral -> neutral. Total and surjective.
constexpr EmotionLabel remap_fer7(Fer7Label l) noexcept {
    switch (l) {
        case Fer7Label::happy:    return EmotionLabel::interested;
        case Fer7Label::surprise: return EmotionLabel::interested;
        case Fer7Label::sad:      return EmotionLabel::bored;
        case Fer7Label::angry:    return EmotionLabel::frustrated;
        case Fer7Label::disgust:  return EmotionLabel::frustrated;
        case Fer7Label::afraid:   return EmotionLabel::confused;
        case Fer7Label::neutral:  return EmotionLabel::neutral;
    }
    return EmotionLabel::neutral;
}

// ─── MappingTable ────────────────────────────────────────────────────────────

/// The Map function: for every (cue, cue-label) pair, the set of emotions
/// that output evidences. Entries may be absent while a table is being
/// built or loaded; validate_mapping reports such defects, and the fusion
/// path requires a table with zero findings.
struct MappingTable {
    /// entries[cue][label index]; nullopt marks a missing entry.
    std::array<std::vector<std::optional<EmotionSet>>, kCueCount> entries;

    /// A table of the right shape with every entry missing.
    static MappingTable empty_skeleton() {
        MappingTable t;
        for (CueKind cue : kCues) {
            t.entries[static_cast<std::size_t>(cue)].resize(label_space_size(cue));
        }
        return t;
    }

    const std::optional<EmotionSet>& entry(CueKind cue, std::uint8_t index) const {
        return entries[static_cast<std::size_t>(cue)][index];
    }

    MappingTable& set(CueKind cue, std::uint8_t index, EmotionSet s) {
        entries[static_cast<std::size_t>(cue)][index] = s;
        return *this;
    }
};

/// The shipped default table. Facial and speech map each emotion to itself.
/// Eye and posture carry the configured emotion-evidence sets:
///   looking_at_screen -> {confused, frustrated, interested}
///   looking_away      -> {bored}
///   slouching         -> {bored, frustrated}
///   upright           -> {neutral, interested}
///   writing           -> {interested}
inline MappingTable default_mapping() {
    using E = EmotionLabel;
    MappingTable t = MappingTable::empty_skeleton();
    for (EmotionLabel e : kEmotions) {
        t.set(CueKind::facial, static_cast<std::uint8_t>(e), EmotionSet{e});
        t.set(CueKind::speech, static_cast<std::uint8_t>(e), EmotionSet{e});
    }
    t.set(CueKind::eye, static_cast<std::uint8_t>(EyeLabel::looking_at_screen),
          EmotionSet{E::confused, E::frustrated, E::interested});
    t.set(CueKind::eye, static_cast<std::uint8_t>(EyeLabel::looking_away),
          EmotionSet{E::bored});
    t.set(CueKind::posture, static_cast<std::uint8_t>(PostureLabel::slouching),
          EmotionSet{E::bored, E::frustrated});
    t.set(CueKind::posture, static_cast<std::uint8_t>(PostureLabel::upright),
          EmotionSet{E::neutral, E::interested});
    t.set(CueKind::posture, static_cast<std::uint8_t>(PostureLabel::writing),
          EmotionSet{E::interested});
    return t;
}

/// Looks up the emotion set a cue output evidences.
/// Requires a table that passes validation; a missing entry is a caller bug.
inline EmotionSet map_cue_output(CueKind cue, CueLabel label, const MappingTable& table) {
    if (label.cue != cue) {
        throw UnknownLabelError("label \"" + std::string(label.name()) +
                                "\" does not belong to cue " + std::string(to_string(cue)));
    }
    const auto& e = table.entry(cue, label.index);
    if (!e) {
        throw Error("mapping table is missing the entry for (" +
                    std::string(to_string(cue)) + ", " + std::string(label.name()) +
                    "); validate tables before use");
    }
    return *e;
}

// ─── Validation ──────────────────────────────────────────────────────────────

struct MappingFinding {
    enum class Kind {
        missing_entry,        // a (cue, label) pair has no entry
        empty_entry,          // an entry maps to the empty set
        unreachable_emotion,  // no cue label evidences this emotion
    };
    Kind kind;
    std::string detail;
};

struct MappingValidation {
    std::vector<MappingFinding> findings;
    bool ok() const noexcept { return findings.empty(); }
};

/// Scans a table for missing entries, empty sets, and emotions unreachable
/// from any cue label. A table with zero findings is usable by fusion.
inline MappingValidation validate_mapping(const MappingTable& table) {
    MappingValidation report;
    EmotionSet reachable;
    for (CueKind cue : kCues) {
        for (std::size_t i = 0; i < label_space_size(cue); ++i) {
            const auto& entry = table.entry(cue, static_cast<std::uint8_t>(i));
            const std::string where =
                std::string(to_string(cue)) + "/" + std::string(label_name(cue, i));
            if (!entry) {
                report.findings.push_back(
                    {MappingFinding::Kind::missing_entry, "missing entry for " + where});
                continue;
            }
            if (entry->empty()) {
                report.findings.push_back(
                    {MappingFinding::Kind::empty_entry, "empty emotion set for " + where});
                continue;
            }
            for (EmotionLabel e : kEmotions) {
                if (entry->contains(e)) reachable.insert(e);
            }
        }
    }
    for (EmotionLabel e : kEmotions) {
        if (!reachable.contains(e)) {
            report.findings.push_back({MappingFinding::Kind::unreachable_emotion,
                                       "emotion " + std::string(to_string(e)) +
                                           " is not reachable from any cue label"});
        }
    }
    return report;
}

}  // namespace affectfuse
