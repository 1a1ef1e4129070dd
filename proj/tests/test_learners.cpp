// test_learners.cpp - model specs, the seven classifiers, and the chance
// baseline: numerics, determinism, and serialization
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "empath/learners.hpp"
#include "empath/rng.hpp"
#include "oracles.hpp"

using Catch::Approx;
using namespace empath;
using learn::Algorithm;
using learn::ModelSpec;

namespace {

// Two noisy clusters at +/-2 along both axes; clearly separable.
void clusters(Matrix& X, std::vector<int>& y, size_t per_class = 10, uint64_t seed = 11) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    y.clear();
    for (size_t i = 0; i < per_class; ++i) {
        rows.push_back({-2.0 + 0.3 * rng.normal(), -2.0 + 0.3 * rng.normal()});
        y.push_back(0);
        rows.push_back({2.0 + 0.3 * rng.normal(), 2.0 + 0.3 * rng.normal()});
        y.push_back(1);
    }
    X = Matrix::from_rows(rows);
}

// Random labels, random features: nothing to learn, plenty to iterate on.
void noise_data(Matrix& X, std::vector<int>& y, size_t n, size_t d, uint64_t seed) {
    Rng rng(seed);
    std::vector<std::vector<double>> rows;
    y.clear();
    for (size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        for (size_t j = 0; j < d; ++j) row.push_back(rng.normal());
        rows.push_back(std::move(row));
        y.push_back(i % 2 == 0 ? 1 : 0);
    }
    rng.shuffle(y);
    bool has0 = false, has1 = false;
    for (int v : y) (v ? has1 : has0) = true;
    REQUIRE((has0 && has1));
    X = Matrix::from_rows(rows);
}

double training_accuracy(const learn::TrainedModel& m, const Matrix& X, const std::vector<int>& y) {
    auto pred = m.predict_labels(X);
    double correct = 0.0;
    for (size_t i = 0; i < y.size(); ++i) correct += pred[i] == y[i];
    return correct / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("the reference boosted-tree configuration is accepted", "[learners]") {
    ModelSpec spec(Algorithm::gradient_boosted_trees,
                   {{"learning_rate", 0.12}, {"max_depth", 6.0}, {"sampling", std::string("uniform")}},
                   7);
    CHECK(spec.number("learning_rate") == 0.12);
    CHECK(spec.number("max_depth") == 6.0);
    CHECK(spec.number("subsample") == 1.0);   // documented default
    CHECK(spec.number("n_rounds") == 100.0);  // documented default
}

TEST_CASE("model specs reject unknown keys, wrong types, and bad ranges", "[learners]") {
    using learn::HyperMap;
    CHECK_THROWS_AS(ModelSpec(Algorithm::logistic_regression, HyperMap{{"banana", 1.0}}),
                    ValidationError);
    CHECK_THROWS_AS(ModelSpec(Algorithm::logistic_regression, HyperMap{{"l2", std::string("x")}}),
                    ValidationError);
    CHECK_THROWS_AS(
        ModelSpec(Algorithm::gradient_boosted_trees, HyperMap{{"sampling", std::string("bernoulli")}}),
        ValidationError);
    CHECK_THROWS_AS(ModelSpec(Algorithm::gradient_boosted_trees, HyperMap{{"sampling", 1.0}}),
                    ValidationError);
    CHECK_THROWS_AS(ModelSpec(Algorithm::gradient_boosted_trees, HyperMap{{"learning_rate", 0.0}}),
                    ValidationError);
    CHECK_THROWS_AS(ModelSpec(Algorithm::gradient_boosted_trees, HyperMap{{"subsample", 1.5}}),
                    ValidationError);
    CHECK_THROWS_AS(ModelSpec(Algorithm::gradient_boosted_trees, HyperMap{{"max_depth", 0.0}}),
                    ValidationError);
    CHECK_THROWS_AS(ModelSpec(Algorithm::linear_svm, HyperMap{{"epochs", 2.5}}), ValidationError);
    CHECK_THROWS_AS(ModelSpec(Algorithm::logistic_regression, HyperMap{{"l2", -0.1}}),
                    ValidationError);
    CHECK_NOTHROW(ModelSpec(Algorithm::decision_tree, HyperMap{{"max_depth", 0.0}}));  // unlimited
}

TEST_CASE("model specs round trip through json", "[learners]") {
    ModelSpec spec(Algorithm::gradient_boosted_trees,
                   {{"learning_rate", 0.12}, {"sampling", std::string("uniform")}}, 42);
    nlohmann::json j = spec;
    auto back = j.get<ModelSpec>();
    CHECK(back.algorithm == spec.algorithm);
    CHECK(back.seed == spec.seed);
    CHECK(back.number("learning_rate") == 0.12);
    nlohmann::json j2 = back;
    CHECK(j == j2);
}

TEST_CASE("a decision tree separates 1-D separable points", "[learners]") {
    auto X = Matrix::from_rows({{0.0}, {1.0}, {2.0}, {3.0}});
    std::vector<int> y = {0, 0, 1, 1};
    auto m = learn::fit(ModelSpec(Algorithm::decision_tree), X, y);
    CHECK(training_accuracy(m, X, y) == 1.0);
    auto imp = m.feature_importances();
    REQUIRE(imp.size() == 1);
    CHECK(imp[0] == Approx(1.0));  // one-hot on the only feature
}

TEST_CASE("tree importances are one-hot when a single split suffices", "[learners]") {
    Rng rng(3);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 20; ++i) {
        double informative = i < 10 ? -1.0 - rng.uniform() : 1.0 + rng.uniform();
        rows.push_back({informative, rng.normal(), rng.normal()});
        y.push_back(i < 10 ? 0 : 1);
    }
    auto m = learn::fit(ModelSpec(Algorithm::decision_tree), Matrix::from_rows(rows), y);
    auto imp = m.feature_importances();
    CHECK(imp[0] == Approx(1.0));
    CHECK(imp[1] == 0.0);
    CHECK(imp[2] == 0.0);
}

TEST_CASE("logistic regression on XOR stalls at chance", "[learners]") {
    auto X = Matrix::from_rows({{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}});
    std::vector<int> y = {0, 0, 1, 1};
    auto m = learn::fit(ModelSpec(Algorithm::logistic_regression), X, y);
    CHECK(training_accuracy(m, X, y) == 0.5);
    for (double s : m.predict_scores(X)) CHECK(s == Approx(0.5).margin(1e-3));

    // Brute force over a weight grid: no linear scorer beats the flat model
    // under the (unregularized) logistic loss on XOR, so 0.5 is the floor.
    double best = std::numeric_limits<double>::infinity();
    for (double w1 = -4.0; w1 <= 4.0; w1 += 0.2) {
        for (double w2 = -4.0; w2 <= 4.0; w2 += 0.2) {
            for (double b = -4.0; b <= 4.0; b += 0.2) {
                std::vector<double> w = {w1, w2};
                best = std::min(best, learn::logistic_objective(X, y, w, b, 0.0));
            }
        }
    }
    CHECK(best >= std::log(2.0) - 1e-9);
}

TEST_CASE("logistic gradient matches central finite differences", "[learners]") {
    Rng rng(17);
    for (int point = 0; point < 20; ++point) {
        size_t n = 5 + rng.index(6);
        size_t d = 2 + rng.index(4);
        std::vector<std::vector<double>> rows;
        std::vector<int> y;
        for (size_t i = 0; i < n; ++i) {
            std::vector<double> row;
            for (size_t j = 0; j < d; ++j) row.push_back(rng.normal());
            rows.push_back(std::move(row));
            y.push_back(i % 2 == 0 ? 1 : 0);
        }
        auto X = Matrix::from_rows(rows);
        std::vector<double> w;
        for (size_t j = 0; j < d; ++j) w.push_back(rng.normal());
        double bias = rng.normal();
        double l2 = 0.37;

        std::vector<double> grad_w;
        double grad_b = 0.0;
        learn::logistic_gradient(X, y, w, bias, l2, grad_w, grad_b);

        auto check_coord = [&](double analytic, auto perturb) {
            const double h = 1e-6;
            double plus = perturb(h);
            double minus = perturb(-h);
            double numeric = (plus - minus) / (2.0 * h);
            double scale = std::max({1.0, std::fabs(analytic), std::fabs(numeric)});
            CHECK(std::fabs(analytic - numeric) / scale < 1e-5);
        };
        for (size_t j = 0; j < d; ++j) {
            check_coord(grad_w[j], [&](double h) {
                std::vector<double> wj = w;
                wj[j] += h;
                return learn::logistic_objective(X, y, wj, bias, l2);
            });
        }
        check_coord(grad_b,
                    [&](double h) { return learn::logistic_objective(X, y, w, bias + h, l2); });
    }
}

TEST_CASE("separable clusters are learned by every real model", "[learners]") {
    Matrix X;
    std::vector<int> y;
    clusters(X, y);
    auto check = [&](ModelSpec spec) {
        auto m = learn::fit(spec, X, y);
        CAPTURE(learn::algorithm_name(spec.algorithm));
        CHECK(training_accuracy(m, X, y) == 1.0);
    };
    check(ModelSpec(Algorithm::logistic_regression, {{"l2", 0.1}}));
    check(ModelSpec(Algorithm::linear_svm, {{"lambda", 0.01}}, 5));
    check(ModelSpec(Algorithm::decision_tree));
    check(ModelSpec(Algorithm::bagging, {{"n_estimators", 15.0}}, 5));
    check(ModelSpec(Algorithm::random_forest, {{"n_estimators", 15.0}}, 5));
    check(ModelSpec(Algorithm::adaboost, {{"n_rounds", 10.0}}));
    check(ModelSpec(Algorithm::gradient_boosted_trees, {{"n_rounds", 20.0}}, 5));
}

TEST_CASE("the chance baseline always predicts the positive class", "[learners]") {
    Matrix X = Matrix::from_rows({{1.0}, {-5.0}, {0.0}});
    std::vector<int> y = {0, 0, 0};  // single class is fine for the baseline
    auto m = learn::fit(ModelSpec(Algorithm::chance_baseline), X, y);
    for (double s : m.predict_scores(X)) CHECK(s == 1.0);
    for (int label : m.predict_labels(X)) CHECK(label == 1);
    CHECK_THROWS_AS(m.feature_importances(), UnsupportedError);
}

TEST_CASE("a probability of exactly 0.5 maps to the negative class", "[learners]") {
    learn::TrainedModel m;
    m.spec = ModelSpec(Algorithm::logistic_regression);
    m.feature_count = 1;
    m.weights = {0.0};
    m.bias = 0.0;
    Matrix X = Matrix::from_rows({{3.0}, {-3.0}});
    for (double s : m.predict_scores(X)) CHECK(s == 0.5);
    for (int label : m.predict_labels(X)) CHECK(label == 0);
}

TEST_CASE("degenerate inputs are rejected", "[learners]") {
    Matrix X = Matrix::from_rows({{1.0}, {2.0}});
    CHECK_THROWS_AS(learn::fit(ModelSpec(Algorithm::decision_tree), X, {1, 1}), ValidationError);
    CHECK_THROWS_AS(learn::fit(ModelSpec(Algorithm::decision_tree), X, {1, 2}), ValidationError);
    Matrix bad = Matrix::from_rows({{1.0}, {std::numeric_limits<double>::quiet_NaN()}});
    CHECK_THROWS_AS(learn::fit(ModelSpec(Algorithm::decision_tree), bad, {0, 1}), ValidationError);
    auto m = learn::fit(ModelSpec(Algorithm::decision_tree), X, {0, 1});
    Matrix wide = Matrix::from_rows({{1.0, 2.0}});
    CHECK_THROWS_AS(m.predict_scores(wide), ValidationError);
}

TEST_CASE("refitting with the same seed reproduces the model bit for bit", "[learners]") {
    Matrix X;
    std::vector<int> y;
    noise_data(X, y, 30, 4, 23);
    for (auto spec : {ModelSpec(Algorithm::logistic_regression),
                      ModelSpec(Algorithm::linear_svm, {}, 9),
                      ModelSpec(Algorithm::decision_tree),
                      ModelSpec(Algorithm::bagging, {{"n_estimators", 8.0}}, 9),
                      ModelSpec(Algorithm::random_forest, {{"n_estimators", 8.0}}, 9),
                      ModelSpec(Algorithm::adaboost, {{"n_rounds", 8.0}}),
                      ModelSpec(Algorithm::gradient_boosted_trees,
                                {{"n_rounds", 8.0}, {"subsample", 0.7}}, 9)}) {
        CAPTURE(learn::algorithm_name(spec.algorithm));
        auto a = learn::fit(spec, X, y);
        auto b = learn::fit(spec, X, y);
        CHECK(learn::serialize_model(a) == learn::serialize_model(b));
    }
}

TEST_CASE("bagging with one estimator equals one tree on its bootstrap", "[learners]") {
    Matrix X;
    std::vector<int> y;
    noise_data(X, y, 24, 3, 31);
    const uint64_t seed = 77;

    // Reproduce the single member's bootstrap by hand.
    Rng member(derive_seed(seed, 0));
    auto idx = member.bootstrap(X.rows);
    std::vector<std::vector<double>> boot_rows;
    std::vector<int> boot_y;
    for (size_t i : idx) {
        auto r = X.row(i);
        boot_rows.emplace_back(r.begin(), r.end());
        boot_y.push_back(y[i]);
    }
    bool has0 = false, has1 = false;
    for (int v : boot_y) (v ? has1 : has0) = true;
    REQUIRE((has0 && has1));
    auto lone_tree = learn::fit(ModelSpec(Algorithm::decision_tree), Matrix::from_rows(boot_rows),
                                boot_y);

    Matrix probe;
    std::vector<int> unused;
    noise_data(probe, unused, 40, 3, 99);
    auto bag = learn::fit(ModelSpec(Algorithm::bagging, {{"n_estimators", 1.0}}, seed), X, y);
    CHECK(bag.predict_labels(probe) == lone_tree.predict_labels(probe));

    // Random forest with full-width candidate subsets reduces the same way.
    auto forest = learn::fit(
        ModelSpec(Algorithm::random_forest, {{"n_estimators", 1.0}, {"mtry", 3.0}}, seed), X, y);
    CHECK(forest.predict_labels(probe) == lone_tree.predict_labels(probe));
}

TEST_CASE("adaboost stump errors never exceed one half", "[learners]") {
    Matrix X;
    std::vector<int> y;
    noise_data(X, y, 40, 3, 13);
    auto m = learn::fit(ModelSpec(Algorithm::adaboost, {{"n_rounds", 25.0}}), X, y);
    REQUIRE_FALSE(m.diagnostics.stump_errors.empty());
    CHECK(m.trees.size() == m.alphas.size());
    CHECK(m.trees.size() == m.diagnostics.stump_errors.size());
    for (double e : m.diagnostics.stump_errors) {
        CHECK(e >= 0.0);
        CHECK(e <= 0.5 + 1e-12);
    }
}

TEST_CASE("adaboost stops early once a stump is perfect", "[learners]") {
    auto X = Matrix::from_rows({{0.0}, {1.0}, {2.0}, {3.0}});
    std::vector<int> y = {0, 0, 1, 1};
    auto m = learn::fit(ModelSpec(Algorithm::adaboost, {{"n_rounds", 50.0}}), X, y);
    CHECK(m.trees.size() == 1);
    CHECK(m.alphas[0] == 1.0);
    CHECK(training_accuracy(m, X, y) == 1.0);
}

TEST_CASE("boosted training loss is non-increasing without subsampling", "[learners]") {
    Matrix X;
    std::vector<int> y;
    noise_data(X, y, 60, 5, 47);
    auto m = learn::fit(ModelSpec(Algorithm::gradient_boosted_trees,
                                  {{"n_rounds", 30.0}, {"max_depth", 3.0}}),
                        X, y);
    REQUIRE(m.diagnostics.round_losses.size() == 31);  // initial loss + 30 rounds
    for (size_t i = 1; i < m.diagnostics.round_losses.size(); ++i) {
        CHECK(m.diagnostics.round_losses[i] <= m.diagnostics.round_losses[i - 1] + 1e-12);
    }
    CHECK(m.diagnostics.round_losses.front() == Approx(std::log(2.0)));
}

TEST_CASE("boosted scores match an independent walker over the dumped trees", "[learners]") {
    std::vector<std::vector<double>> rows = {{0.1, 0.9}, {0.8, 0.2}, {0.3, 0.4}, {0.9, 0.8},
                                             {0.5, 0.1}, {0.2, 0.6}, {0.7, 0.7}, {0.4, 0.3}};
    std::vector<int> y = {1, 0, 1, 0, 0, 1, 0, 1};
    auto X = Matrix::from_rows(rows);
    auto m = learn::fit(ModelSpec(Algorithm::gradient_boosted_trees,
                                  {{"n_rounds", 12.0}, {"learning_rate", 0.12}, {"max_depth", 3.0}}),
                        X, y);
    auto ours = m.predict_scores(X);
    auto walked = oracles::boosted_scores(learn::serialize_model(m), rows);
    REQUIRE(ours.size() == walked.size());
    for (size_t i = 0; i < ours.size(); ++i) {
        CHECK(ours[i] == Approx(walked[i]).margin(1e-9));
    }
    // Labels are exactly the strict 0.5 thresholding of those scores.
    auto labels = m.predict_labels(X);
    for (size_t i = 0; i < ours.size(); ++i) {
        CHECK(labels[i] == (ours[i] > 0.5 ? 1 : 0));
    }
}

TEST_CASE("importances are a distribution whenever any split exists", "[learners]") {
    Matrix X;
    std::vector<int> y;
    clusters(X, y, 15, 29);
    for (auto spec : {ModelSpec(Algorithm::decision_tree),
                      ModelSpec(Algorithm::random_forest, {{"n_estimators", 10.0}}, 3),
                      ModelSpec(Algorithm::adaboost, {{"n_rounds", 5.0}}),
                      ModelSpec(Algorithm::gradient_boosted_trees, {{"n_rounds", 10.0}}, 3),
                      ModelSpec(Algorithm::logistic_regression)}) {
        CAPTURE(learn::algorithm_name(spec.algorithm));
        auto m = learn::fit(spec, X, y);
        auto imp = m.feature_importances();
        double total = 0.0;
        for (double v : imp) {
            CHECK(v >= 0.0);
            total += v;
        }
        CHECK(total == Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("a planted feature dominates boosted importances", "[learners]") {
    Rng rng(53);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 100; ++i) {
        int label = static_cast<int>(rng.index(2));
        rows.push_back({rng.normal(), rng.normal(),
                        (label ? 1.2 : -1.2) + 0.3 * rng.normal(), rng.normal()});
        y.push_back(label);
    }
    auto m = learn::fit(ModelSpec(Algorithm::gradient_boosted_trees, {{"n_rounds", 15.0}}, 1),
                        Matrix::from_rows(rows), y);
    auto imp = m.feature_importances();
    size_t best = std::distance(imp.begin(), std::max_element(imp.begin(), imp.end()));
    CHECK(best == 2);
}

TEST_CASE("serialized models reload to bit-identical predictions", "[learners]") {
    Matrix X;
    std::vector<int> y;
    noise_data(X, y, 30, 4, 61);
    Matrix probe;
    std::vector<int> unused;
    noise_data(probe, unused, 25, 4, 62);
    for (auto spec : {ModelSpec(Algorithm::logistic_regression),
                      ModelSpec(Algorithm::linear_svm, {}, 2),
                      ModelSpec(Algorithm::decision_tree),
                      ModelSpec(Algorithm::bagging, {{"n_estimators", 6.0}}, 2),
                      ModelSpec(Algorithm::random_forest, {{"n_estimators", 6.0}}, 2),
                      ModelSpec(Algorithm::adaboost, {{"n_rounds", 6.0}}),
                      ModelSpec(Algorithm::gradient_boosted_trees, {{"n_rounds", 6.0}}, 2),
                      ModelSpec(Algorithm::chance_baseline)}) {
        CAPTURE(learn::algorithm_name(spec.algorithm));
        auto m = learn::fit(spec, X, y);
        std::string text = learn::serialize_model(m);
        auto back = learn::deserialize_model(text);
        CHECK(back.predict_scores(probe) == m.predict_scores(probe));
        CHECK(learn::serialize_model(back) == text);
    }
}
