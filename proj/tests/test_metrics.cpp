#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "affectfuse/metrics.hpp"

using namespace affectfuse;

namespace {

using Event = std::pair<std::string, std::string>;  // (predicted, actual)

std::vector<Event> random_events(std::mt19937_64& gen, std::size_t count) {
    std::uniform_int_distribution<std::size_t> pick(0, kEmotionCount - 1);
    std::vector<Event> events;
    events.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        events.push_back({std::string(to_string(kEmotions[pick(gen)])),
                          std::string(to_string(kEmotions[pick(gen)]))});
    }
    return events;
}

ConfusionMatrix tally(const std::vector<Event>& events) {
    ConfusionMatrix m = ConfusionMatrix::over_emotions();
    for (const auto& [p, a] : events) m.record(p, a);
    return m;
}

// Brute-force count of each (predicted, actual) pair, bypassing the matrix.
std::map<Event, std::uint64_t> recount(const std::vector<Event>& events) {
    std::map<Event, std::uint64_t> counts;
    for (const auto& e : events) counts[e] += 1;
    return counts;
}

bool same_counts(const ConfusionMatrix& m, const std::map<Event, std::uint64_t>& expected) {
    for (std::size_t p = 0; p < m.size(); ++p) {
        for (std::size_t a = 0; a < m.size(); ++a) {
            const Event key{m.labels()[p], m.labels()[a]};
            const auto it = expected.find(key);
            const std::uint64_t want = it == expected.end() ? 0 : it->second;
            if (m.at(p, a) != want) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("recorded events are counted exactly, verified by an independent tally") {
    std::mt19937_64 gen(808);
    for (int round = 0; round < 50; ++round) {
        const auto events = random_events(gen, 200);
        const ConfusionMatrix m = tally(events);
        REQUIRE(same_counts(m, recount(events)));
        CHECK(m.total() == events.size());

        std::uint64_t correct = 0;
        for (const auto& [p, a] : events) correct += (p == a) ? 1 : 0;
        CHECK(m.trace() == correct);
    }
}

TEST_CASE("matrices admit arbitrary label spaces") {
    const ConfusionMatrix m = ConfusionMatrix::over_cue_space(CueKind::posture);
    REQUIRE(m.size() == 3);
    CHECK(m.labels()[0] == "slouching");
    CHECK(m.labels()[1] == "upright");
    CHECK(m.labels()[2] == "writing");

    ConfusionMatrix custom(std::vector<std::string>{"hit", "miss"});
    custom.record("hit", "miss");
    CHECK(custom.at(0, 1) == 1);
    CHECK_THROWS_AS(custom.record("hit", "unknown"), UnknownLabelError);
}

TEST_CASE("merging two matrices equals tallying the concatenated events") {
    std::mt19937_64 gen(1234);
    for (int round = 0; round < 100; ++round) {
        const auto a = random_events(gen, 80);
        const auto b = random_events(gen, 120);

        ConfusionMatrix merged = tally(a);
        merged.merge(tally(b));

        std::vector<Event> all = a;
        all.insert(all.end(), b.begin(), b.end());
        const ConfusionMatrix straight = tally(all);

        for (std::size_t p = 0; p < merged.size(); ++p) {
            for (std::size_t q = 0; q < merged.size(); ++q) {
                REQUIRE(merged.at(p, q) == straight.at(p, q));
            }
        }
    }
}

TEST_CASE("merge is associative with an empty-matrix identity") {
    std::mt19937_64 gen(5678);
    const auto a = random_events(gen, 50);
    const auto b = random_events(gen, 50);
    const auto c = random_events(gen, 50);

    ConfusionMatrix left = tally(a);
    left.merge(tally(b));
    left.merge(tally(c));

    ConfusionMatrix bc = tally(b);
    bc.merge(tally(c));
    ConfusionMatrix right = tally(a);
    right.merge(bc);

    for (std::size_t p = 0; p < left.size(); ++p) {
        for (std::size_t q = 0; q < left.size(); ++q) {
            CHECK(left.at(p, q) == right.at(p, q));
        }
    }

    ConfusionMatrix with_identity = tally(a);
    with_identity.merge(ConfusionMatrix::over_emotions());
    const ConfusionMatrix plain = tally(a);
    for (std::size_t p = 0; p < plain.size(); ++p) {
        for (std::size_t q = 0; q < plain.size(); ++q) {
            CHECK(with_identity.at(p, q) == plain.at(p, q));
        }
    }
}

TEST_CASE("merging matrices over different label spaces is an error") {
    ConfusionMatrix emotions = ConfusionMatrix::over_emotions();
    CHECK_THROWS_AS(emotions.merge(ConfusionMatrix::over_cue_space(CueKind::eye)),
                    SpaceMismatchError);
}

TEST_CASE("summaries match hand-computed precision, recall, and F1") {
    // predicted\actual   yes  no
    //   yes                3   1
    //   no                 2   4
    ConfusionMatrix m(std::vector<std::string>{"yes", "no"});
    for (int i = 0; i < 3; ++i) m.record("yes", "yes");
    m.record("yes", "no");
    for (int i = 0; i < 2; ++i) m.record("no", "yes");
    for (int i = 0; i < 4; ++i) m.record("no", "no");

    const MatrixSummary s = summarize(m);
    CHECK(s.accuracy == 7.0 / 10.0);
    REQUIRE(s.per_class.size() == 2);
    CHECK(*s.per_class[0].precision == 3.0 / 4.0);
    CHECK(*s.per_class[0].recall == 3.0 / 5.0);
    const double f1_yes = 2.0 * (3.0 / 4.0) * (3.0 / 5.0) / (3.0 / 4.0 + 3.0 / 5.0);
    CHECK_THAT(*s.per_class[0].f1, Catch::Matchers::WithinAbs(f1_yes, 1e-15));
    CHECK(*s.per_class[1].precision == 4.0 / 6.0);
    CHECK(*s.per_class[1].recall == 4.0 / 5.0);
}

TEST_CASE("classes that never occur drop out of the macro averages") {
    ConfusionMatrix m = ConfusionMatrix::over_emotions();
    m.record("bored", "bored");
    m.record("bored", "confused");
    m.record("confused", "confused");

    const MatrixSummary s = summarize(m);
    // frustrated/interested/neutral never appear: no precision, no recall.
    for (std::size_t c = 2; c < 5; ++c) {
        CHECK_FALSE(s.per_class[c].precision.has_value());
        CHECK_FALSE(s.per_class[c].recall.has_value());
        CHECK_FALSE(s.per_class[c].f1.has_value());
    }
    // Macro averages span only the defined classes.
    const double macro_recall = (1.0 / 1.0 + 1.0 / 2.0) / 2.0;
    REQUIRE(s.macro_recall.has_value());
    CHECK_THAT(*s.macro_recall, Catch::Matchers::WithinAbs(macro_recall, 1e-15));
}

TEST_CASE("summarizing an empty matrix is an error") {
    CHECK_THROWS_AS(summarize(ConfusionMatrix::over_emotions()), EmptyMatrixError);
}

TEST_CASE("a 250-of-251 recall column computes exactly") {
    ConfusionMatrix m = ConfusionMatrix::over_cue_space(CueKind::posture);
    for (int i = 0; i < 250; ++i) m.record("slouching", "slouching");
    m.record("upright", "slouching");  // the single miss
    for (int i = 0; i < 40; ++i) m.record("upright", "upright");

    const MatrixSummary s = summarize(m);
    REQUIRE(s.per_class[0].recall.has_value());
    // Both sides are the same double division, so equality is exact.
    CHECK(*s.per_class[0].recall == 250.0 / 251.0);
}

TEST_CASE("row and column sums agree with the recorded totals") {
    std::mt19937_64 gen(31);
    const auto events = random_events(gen, 500);
    const ConfusionMatrix m = tally(events);

    std::uint64_t rows = 0, cols = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        rows += m.row_sum(i);
        cols += m.column_sum(i);
    }
    CHECK(rows == m.total());
    CHECK(cols == m.total());
}

TEST_CASE("rendered matrices carry their labels and counts") {
    ConfusionMatrix m = ConfusionMatrix::over_emotions();
    m.record("bored", "confused");
    const std::string text = format_matrix(m, "demo");
    CHECK(text.find("demo") != std::string::npos);
    CHECK(text.find("bored") != std::string::npos);
    CHECK(text.find("1") != std::string::npos);

    const std::string summary_text = format_summary(m, summarize(m));
    CHECK(summary_text.find("accuracy") != std::string::npos);
    CHECK(summary_text.find("-") != std::string::npos);  // undefined metrics render as "-"
}
