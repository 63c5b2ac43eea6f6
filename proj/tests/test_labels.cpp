#include <catch2/catch_amalgamated.hpp>

#include <cctype>
#include <string>

#include "affectfuse/labels.hpp"

using namespace affectfuse;

TEST_CASE("emotion labels parse case-insensitively and round-trip") {
    for (EmotionLabel e : kEmotions) {
        const std::string name{to_string(e)};
        CHECK(parse_emotion(name) == e);
        std::string upper = name;
        for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        CHECK(parse_emotion(upper) == e);
    }
    CHECK_FALSE(try_parse_emotion("ecstatic").has_value());
    CHECK_THROWS_AS(parse_emotion("ecstatic"), UnknownLabelError);
    CHECK_THROWS_AS(parse_emotion(""), UnknownLabelError);
}

TEST_CASE("emotion enumeration is alphabetical and dense") {
    REQUIRE(kEmotionCount == 5);
    CHECK(to_string(kEmotions[0]) == "bored");
    CHECK(to_string(kEmotions[1]) == "confused");
    CHECK(to_string(kEmotions[2]) == "frustrated");
    CHECK(to_string(kEmotions[3]) == "interested");
    CHECK(to_string(kEmotions[4]) == "neutral");
    for (std::size_t i = 0; i < kEmotionCount; ++i) {
        CHECK(static_cast<std::size_t>(kEmotions[i]) == i);
    }
}

TEST_CASE("cue kinds parse and enumerate in accumulation order") {
    REQUIRE(kCueCount == 4);
    CHECK(to_string(kCues[0]) == "facial");
    CHECK(to_string(kCues[1]) == "speech");
    CHECK(to_string(kCues[2]) == "eye");
    CHECK(to_string(kCues[3]) == "posture");
    for (CueKind c : kCues) {
        CHECK(parse_cue(std::string(to_string(c))) == c);
    }
    CHECK_THROWS_AS(parse_cue("gesture"), UnknownLabelError);
}

TEST_CASE("label spaces have the documented sizes and names") {
    CHECK(label_space_size(CueKind::facial) == 5);
    CHECK(label_space_size(CueKind::speech) == 5);
    CHECK(label_space_size(CueKind::eye) == 2);
    CHECK(label_space_size(CueKind::posture) == 3);

    CHECK(label_name(CueKind::eye, 0) == "looking_at_screen");
    CHECK(label_name(CueKind::eye, 1) == "looking_away");
    CHECK(label_name(CueKind::posture, 0) == "slouching");
    CHECK(label_name(CueKind::posture, 1) == "upright");
    CHECK(label_name(CueKind::posture, 2) == "writing");
    CHECK(label_name(CueKind::facial, 2) == "frustrated");
}

TEST_CASE("cue labels reject names from a different cue's space") {
    CHECK(parse_cue_label(CueKind::posture, "slouching") ==
          posture_label(PostureLabel::slouching));
    CHECK_THROWS_AS(parse_cue_label(CueKind::facial, "slouching"), UnknownLabelError);
    CHECK_THROWS_AS(parse_cue_label(CueKind::eye, "bored"), UnknownLabelError);
    CHECK_FALSE(try_parse_cue_label(CueKind::speech, "looking_away").has_value());
}

TEST_CASE("only facial and speech labels carry an emotion directly") {
    CHECK(as_emotion(facial_label(EmotionLabel::confused)) == EmotionLabel::confused);
    CHECK(as_emotion(speech_label(EmotionLabel::bored)) == EmotionLabel::bored);
    CHECK_FALSE(as_emotion(eye_label(EyeLabel::looking_away)).has_value());
    CHECK_FALSE(as_emotion(posture_label(PostureLabel::writing)).has_value());
}

TEST_CASE("label_space lists every label of a cue in index order") {
    for (CueKind cue : kCues) {
        const auto space = label_space(cue);
        REQUIRE(space.size() == label_space_size(cue));
        for (std::size_t i = 0; i < space.size(); ++i) {
            CHECK(space[i].cue == cue);
            CHECK(space[i].index == i);
            CHECK(space[i].name() == label_name(cue, i));
        }
    }
}
