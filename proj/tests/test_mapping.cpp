#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "affectfuse/mapping.hpp"

using namespace affectfuse;

TEST_CASE("emotion sets behave like small ordered sets") {
    EmotionSet s;
    CHECK(s.empty());
    CHECK(s.size() == 0);

    s.insert(EmotionLabel::frustrated);
    s.insert(EmotionLabel::bored);
    s.insert(EmotionLabel::frustrated);  // duplicate insert is a no-op
    CHECK(s.size() == 2);
    CHECK(s.contains(EmotionLabel::bored));
    CHECK(s.contains(EmotionLabel::frustrated));
    CHECK_FALSE(s.contains(EmotionLabel::neutral));

    const auto listed = s.labels();
    REQUIRE(listed.size() == 2);
    CHECK(listed[0] == EmotionLabel::bored);  // enumeration order
    CHECK(listed[1] == EmotionLabel::frustrated);

    const EmotionSet lit{EmotionLabel::interested, EmotionLabel::neutral};
    CHECK(lit.size() == 2);
    CHECK(lit.contains(EmotionLabel::neutral));
}

TEST_CASE("the default table maps facial and speech labels to themselves") {
    const MappingTable table = default_mapping();
    for (CueKind cue : {CueKind::facial, CueKind::speech}) {
        for (EmotionLabel e : kEmotions) {
            const auto& entry = table.entry(cue, static_cast<std::uint8_t>(e));
            REQUIRE(entry.has_value());
            CHECK(entry->size() == 1);
            CHECK(entry->contains(e));
        }
    }
}

TEST_CASE("the default table maps gaze and posture to their documented sets") {
    const MappingTable table = default_mapping();

    const auto at = [&](CueKind cue, std::uint8_t idx) {
        const auto& entry = table.entry(cue, idx);
        REQUIRE(entry.has_value());
        return *entry;
    };

    const EmotionSet on_screen = at(CueKind::eye, 0);
    CHECK(on_screen.size() == 3);
    CHECK(on_screen.contains(EmotionLabel::confused));
    CHECK(on_screen.contains(EmotionLabel::frustrated));
    CHECK(on_screen.contains(EmotionLabel::interested));

    const EmotionSet away = at(CueKind::eye, 1);
    CHECK(away.size() == 1);
    CHECK(away.contains(EmotionLabel::bored));

    const EmotionSet slouch = at(CueKind::posture, 0);
    CHECK(slouch.size() == 2);
    CHECK(slouch.contains(EmotionLabel::bored));
    CHECK(slouch.contains(EmotionLabel::frustrated));

    const EmotionSet upright = at(CueKind::posture, 1);
    CHECK(upright.size() == 2);
    CHECK(upright.contains(EmotionLabel::neutral));
    CHECK(upright.contains(EmotionLabel::interested));

    const EmotionSet writing = at(CueKind::posture, 2);
    CHECK(writing.size() == 1);
    CHECK(writing.contains(EmotionLabel::interested));
}

TEST_CASE("the seven-class facial vocabulary collapses onto the five emotions") {
    CHECK(remap_fer7(Fer7Label::happy) == EmotionLabel::interested);
    CHECK(remap_fer7(Fer7Label::surprise) == EmotionLabel::interested);
    CHECK(remap_fer7(Fer7Label::sad) == EmotionLabel::bored);
    CHECK(remap_fer7(Fer7Label::angry) == EmotionLabel::frustrated);
    CHECK(remap_fer7(Fer7Label::disgust) == EmotionLabel::frustrated);
    CHECK(remap_fer7(Fer7Label::afraid) == EmotionLabel::confused);
    CHECK(remap_fer7(Fer7Label::neutral) == EmotionLabel::neutral);

    // Surjectivity: every target emotion is hit by some source label.
    bool hit[kEmotionCount] = {};
    for (Fer7Label l : kFer7Labels) hit[static_cast<std::size_t>(remap_fer7(l))] = true;
    for (bool h : hit) CHECK(h);

    CHECK(parse_fer7("Angry") == Fer7Label::angry);
    CHECK_THROWS_AS(parse_fer7("contempt"), UnknownLabelError);
}

TEST_CASE("the shipped default table validates with zero findings") {
    const auto report = validate_mapping(default_mapping());
    CHECK(report.ok());
    CHECK(report.findings.empty());
}

TEST_CASE("validation finds missing entries, empty sets, and unreachable emotions") {
    SECTION("a skeleton table is all missing entries") {
        const auto report = validate_mapping(MappingTable::empty_skeleton());
        CHECK_FALSE(report.ok());
        std::size_t missing = 0;
        for (const auto& f : report.findings) {
            if (f.kind == MappingFinding::Kind::missing_entry) ++missing;
        }
        CHECK(missing == 5 + 5 + 2 + 3);
    }

    SECTION("an empty set is reported with its cue and label") {
        MappingTable table = default_mapping();
        table.set(CueKind::eye, 1, EmotionSet{});
        const auto report = validate_mapping(table);
        REQUIRE_FALSE(report.ok());
        bool found = false;
        for (const auto& f : report.findings) {
            if (f.kind == MappingFinding::Kind::empty_entry) {
                found = true;
                CHECK(f.detail.find("eye") != std::string::npos);
                CHECK(f.detail.find("looking_away") != std::string::npos);
            }
        }
        CHECK(found);
    }

    SECTION("an emotion no label evidences is reported") {
        MappingTable table = default_mapping();
        // Remove every mention of "bored": speech/facial identity entries
        // plus the gaze and posture sets that include it.
        table.set(CueKind::facial, static_cast<std::uint8_t>(EmotionLabel::bored),
                  EmotionSet{EmotionLabel::neutral});
        table.set(CueKind::speech, static_cast<std::uint8_t>(EmotionLabel::bored),
                  EmotionSet{EmotionLabel::neutral});
        table.set(CueKind::eye, 1, EmotionSet{EmotionLabel::neutral});
        table.set(CueKind::posture, 0, EmotionSet{EmotionLabel::frustrated});
        const auto report = validate_mapping(table);
        REQUIRE_FALSE(report.ok());
        bool found = false;
        for (const auto& f : report.findings) {
            if (f.kind == MappingFinding::Kind::unreachable_emotion) {
                found = true;
                CHECK(f.detail.find("bored") != std::string::npos);
            }
        }
        CHECK(found);
    }
}

TEST_CASE("looking up a cue output yields its mapped emotion set") {
    const MappingTable table = default_mapping();
    const EmotionSet s =
        map_cue_output(CueKind::posture, posture_label(PostureLabel::writing), table);
    CHECK(s.size() == 1);
    CHECK(s.contains(EmotionLabel::interested));
}
