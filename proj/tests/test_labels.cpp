// test_labels.cpp - questionnaire scoring, Cronbach's alpha, median split
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "empath/labels.hpp"
#include "empath/rng.hpp"
#include "oracles.hpp"
#include "scratch.hpp"

using Catch::Approx;
using namespace empath;

namespace {

labels::QuestionnaireResponse response(const std::string& pid, const std::string& story,
                                       std::vector<int> items) {
    labels::QuestionnaireResponse r;
    r.participant_id = pid;
    r.story_id = story;
    r.items = std::move(items);
    return r;
}

}  // namespace

TEST_CASE("empathy score sums the eight items", "[labels]") {
    CHECK(labels::empathy_score(response("p", "S1", {3, 3, 3, 3, 3, 3, 3, 3})) == 24);
    CHECK(labels::empathy_score(response("p", "S1", {5, 5, 5, 5, 5, 5, 5, 5})) == 40);
    CHECK(labels::empathy_score(response("p", "S1", {4, 3, 5, 2, 4, 3, 3, 4})) == 28);
}

TEST_CASE("empathy score is permutation-invariant in the items", "[labels]") {
    std::vector<int> items = {4, 3, 5, 2, 4, 3, 3, 4};
    int base = labels::empathy_score(response("p", "S1", items));
    std::sort(items.begin(), items.end());
    do {
        CHECK(labels::empathy_score(response("p", "S1", items)) == base);
    } while (std::next_permutation(items.begin(), items.end()) && items.front() < 3);
}

TEST_CASE("malformed responses are rejected", "[labels]") {
    CHECK_THROWS_AS(labels::empathy_score(response("p", "S1", {3, 3, 3, 3, 3, 3, 3})),
                    ValidationError);
    CHECK_THROWS_AS(labels::empathy_score(response("p", "S1", {3, 3, 3, 3, 3, 3, 3, 6})),
                    ValidationError);
    CHECK_THROWS_AS(labels::empathy_score(response("p", "S1", {0, 3, 3, 3, 3, 3, 3, 3})),
                    ValidationError);
}

TEST_CASE("perfectly correlated items give alpha 1", "[labels]") {
    // Each respondent repeats their own item-1 value across all items.
    std::vector<labels::QuestionnaireResponse> rs;
    for (int v : {1, 2, 4, 5}) {
        rs.push_back(response("p" + std::to_string(v), "S1", std::vector<int>(8, v)));
    }
    CHECK(labels::cronbach_alpha(rs) == Approx(1.0).margin(1e-12));
}

TEST_CASE("zero total-score variance makes alpha undefined", "[labels]") {
    std::vector<std::vector<double>> matrix = {{1.0, 2.0}, {2.0, 1.0}};
    CHECK_THROWS_AS(labels::cronbach_alpha(matrix), ValidationError);
}

TEST_CASE("alpha on a fixed table matches the brute-force oracle", "[labels]") {
    // Hand arithmetic: item variances 5/3 + 2/3 + 5/3 = 4, total variance 10,
    // alpha = (3/2)(1 - 4/10) = 0.9.
    std::vector<std::vector<double>> matrix = {
        {3.0, 4.0, 3.0}, {4.0, 5.0, 5.0}, {2.0, 3.0, 2.0}, {5.0, 4.0, 4.0}};
    double a = labels::cronbach_alpha(matrix);
    CHECK(a == Approx(0.9).margin(1e-12));
    CHECK(a == Approx(oracles::cronbach_alpha(matrix)).margin(1e-12));
}

TEST_CASE("alpha is invariant under adding a constant to every item", "[labels]") {
    std::vector<std::vector<double>> matrix = {
        {3.0, 4.0, 3.0, 2.0}, {4.0, 5.0, 5.0, 4.0}, {2.0, 3.0, 2.0, 3.0}, {5.0, 4.0, 4.0, 5.0}};
    double base = labels::cronbach_alpha(matrix);
    for (auto& row : matrix) {
        for (double& v : row) v += 7.5;
    }
    CHECK(labels::cronbach_alpha(matrix) == Approx(base).margin(1e-12));
}

TEST_CASE("alpha never exceeds 1 on random tables", "[labels]") {
    Rng rng(20260823);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> matrix;
        for (int i = 0; i < 6; ++i) {
            std::vector<double> row;
            for (int j = 0; j < 5; ++j) row.push_back(rng.normal());
            matrix.push_back(row);
        }
        CHECK(labels::cronbach_alpha(matrix) <= 1.0 + 1e-12);
    }
}

TEST_CASE("median split on two scores", "[labels]") {
    std::map<std::pair<std::string, std::string>, int> scores = {
        {{"a", "S1"}, 20}, {{"b", "S1"}, 25}};
    auto ls = labels::median_split(scores);
    CHECK(ls.median == Approx(22.5));
    CHECK(ls.labels.at({"a", "S1"}) == labels::EmpathyLabel::less_empathic);
    CHECK(ls.labels.at({"b", "S1"}) == labels::EmpathyLabel::empathic);
}

TEST_CASE("all-equal scores label everyone less empathic", "[labels]") {
    std::map<std::pair<std::string, std::string>, int> scores = {
        {{"a", "S1"}, 24}, {{"b", "S1"}, 24}, {{"c", "S1"}, 24}};
    auto ls = labels::median_split(scores);
    for (const auto& [key, label] : ls.labels) {
        CHECK(label == labels::EmpathyLabel::less_empathic);
    }
}

TEST_CASE("122-score sample with median 24.5 splits exactly at 25", "[labels]") {
    // 61 scores in [12, 24] and 61 in [25, 37], anchored so the middle two
    // sorted values are 24 and 25.
    Rng rng(7);
    std::map<std::pair<std::string, std::string>, int> scores;
    auto key = [](int i) {
        return std::make_pair("P" + std::to_string(i), "S" + std::to_string(i % 3 + 1));
    };
    scores[key(0)] = 24;
    scores[key(1)] = 25;
    for (int i = 2; i < 62; ++i) scores[key(i)] = 12 + static_cast<int>(rng.index(13));
    for (int i = 62; i < 122; ++i) scores[key(i)] = 25 + static_cast<int>(rng.index(13));
    REQUIRE(scores.size() == 122);

    auto ls = labels::median_split(scores);
    CHECK(ls.median == Approx(24.5));

    // Brute-force reference: sort all values, median = mean of the middle two,
    // then compare every label against the strict cutoff.
    std::vector<int> sorted;
    for (const auto& [k, s] : scores) sorted.push_back(s);
    std::sort(sorted.begin(), sorted.end());
    double ref_median = 0.5 * (sorted[60] + sorted[61]);
    REQUIRE(ref_median == 24.5);
    for (const auto& [k, s] : scores) {
        auto expect = s > ref_median ? labels::EmpathyLabel::empathic
                                     : labels::EmpathyLabel::less_empathic;
        CHECK(ls.labels.at(k) == expect);
        CHECK((s >= 25) == (ls.labels.at(k) == labels::EmpathyLabel::empathic));
    }
}

TEST_CASE("labels are invariant under increasing score transforms", "[labels]") {
    std::map<std::pair<std::string, std::string>, int> scores = {
        {{"a", "S1"}, 15}, {{"b", "S1"}, 22}, {{"c", "S1"}, 30}, {{"d", "S1"}, 35}};
    auto base = labels::median_split(scores);
    std::map<std::pair<std::string, std::string>, int> warped;
    for (const auto& [k, s] : scores) warped[k] = 3 * s + 7;
    auto after = labels::median_split(warped);
    for (const auto& [k, label] : base.labels) {
        CHECK(after.labels.at(k) == label);
    }
}

TEST_CASE("median split requires at least two scores", "[labels]") {
    std::map<std::pair<std::string, std::string>, int> one = {{{"a", "S1"}, 24}};
    CHECK_THROWS_AS(labels::median_split(one), ValidationError);
    CHECK_THROWS_AS(labels::median_split({}), ValidationError);
}

TEST_CASE("label_responses rejects duplicate participant-story pairs", "[labels]") {
    std::vector<labels::QuestionnaireResponse> rs = {
        response("a", "S1", {3, 3, 3, 3, 3, 3, 3, 3}),
        response("a", "S1", {4, 4, 4, 4, 4, 4, 4, 4})};
    CHECK_THROWS_AS(labels::label_responses(rs), ValidationError);
}

TEST_CASE("questionnaire file round trip", "[labels]") {
    auto dir = testutil::scratch_dir("labels");
    testutil::write_text(dir / "q.csv",
                         "participant_id,story_id,item_1,item_2,item_3,item_4,item_5,item_6,item_7,item_8\n"
                         "P01,S1,4,3,5,2,4,3,3,4\n"
                         "P01,S2,2,2,1,3,2,2,1,2\n"
                         "P02,S1,5,4,4,5,3,4,5,4\n");
    auto rs = labels::read_questionnaire((dir / "q.csv").string());
    REQUIRE(rs.size() == 3);
    CHECK(labels::empathy_score(rs[0]) == 28);
    CHECK(labels::empathy_score(rs[1]) == 15);
    CHECK(labels::empathy_score(rs[2]) == 34);

    auto ls = labels::label_responses(rs);
    labels::write_labels(ls, (dir / "labels.csv").string());
    auto back = labels::read_labels((dir / "labels.csv").string());
    CHECK(back.median == ls.median);
    CHECK(back.scores == ls.scores);
    CHECK(back.labels == ls.labels);
}

TEST_CASE("questionnaire file with an out-of-range item fails validation", "[labels]") {
    auto dir = testutil::scratch_dir("labels");
    testutil::write_text(dir / "bad.csv",
                         "participant_id,story_id,item_1,item_2,item_3,item_4,item_5,item_6,item_7,item_8\n"
                         "P01,S1,4,3,5,2,4,3,3,9\n");
    CHECK_THROWS_AS(labels::read_questionnaire((dir / "bad.csv").string()), ValidationError);
}
