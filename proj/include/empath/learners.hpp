// learners.hpp - binary classifiers behind one fit/predict/score/importance contract
//
// Eight algorithms, all hand-rolled and deterministic given ModelSpec.seed:
//   logistic_regression   probability (sigmoid); GD + backtracking line search
//   linear_svm            margin; Pegasos-style SGD with averaged iterates
//   decision_tree         probability (leaf positive fraction); CART/Gini
//   bagging               probability (vote fraction over bootstrap trees)
//   random_forest         probability (vote fraction; per-split mtry subset)
//   adaboost              probability (alpha-weighted vote fraction); SAMME stumps
//   gradient_boosted_trees probability (sigmoid of additive raw score)
//   chance_baseline       constant score 1.0, always positive
// Probability scores threshold at 0.5, margins at 0; ties go negative.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "empath/common.hpp"
#include "empath/matrix.hpp"
#include "empath/rng.hpp"
#include "empath/trees.hpp"

namespace empath::learn {

// =====================================================================
// ModelSpec
// =====================================================================

enum class Algorithm {
    logistic_regression,
    linear_svm,
    decision_tree,
    bagging,
    random_forest,
    adaboost,
    gradient_boosted_trees,
    chance_baseline,
};

inline std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::logistic_regression: return "logistic_regression";
        case Algorithm::linear_svm: return "linear_svm";
        case Algorithm::decision_tree: return "decision_tree";
        case Algorithm::bagging: return "bagging";
        case Algorithm::random_forest: return "random_forest";
        case Algorithm::adaboost: return "adaboost";
        case Algorithm::gradient_boosted_trees: return "gradient_boosted_trees";
        case Algorithm::chance_baseline: return "chance_baseline";
    }
    throw Error("unreachable algorithm tag");
}

inline Algorithm algorithm_from_name(const std::string& name) {
    for (Algorithm a : {Algorithm::logistic_regression, Algorithm::linear_svm,
                        Algorithm::decision_tree, Algorithm::bagging, Algorithm::random_forest,
                        Algorithm::adaboost, Algorithm::gradient_boosted_trees,
                        Algorithm::chance_baseline}) {
        if (algorithm_name(a) == name) return a;
    }
    throw ValidationError("unknown algorithm '" + name + "'");
}

using HyperValue = std::variant<double, std::string>;
using HyperMap = std::map<std::string, HyperValue>;

namespace spec_detail {

struct KeyInfo {
    double default_value = 0.0;
    bool is_text = false;
};

inline const std::map<std::string, KeyInfo>& allowed_keys(Algorithm a) {
    static const std::map<Algorithm, std::map<std::string, KeyInfo>> table = {
        {Algorithm::logistic_regression,
         {{"l2", {1.0}}, {"max_iter", {1000.0}}, {"tol", {1e-6}}}},
        {Algorithm::linear_svm, {{"lambda", {1.0}}, {"epochs", {200.0}}}},
        {Algorithm::decision_tree, {{"max_depth", {0.0}}, {"min_samples_leaf", {1.0}}}},
        {Algorithm::bagging,
         {{"n_estimators", {100.0}}, {"max_depth", {0.0}}, {"min_samples_leaf", {1.0}}}},
        {Algorithm::random_forest,
         {{"n_estimators", {100.0}},
          {"mtry", {0.0}},  // 0 = ceil(sqrt(feature count)), resolved at fit
          {"max_depth", {0.0}},
          {"min_samples_leaf", {1.0}}}},
        {Algorithm::adaboost, {{"n_rounds", {100.0}}}},
        {Algorithm::gradient_boosted_trees,
         {{"n_rounds", {100.0}},
          {"learning_rate", {0.12}},
          {"max_depth", {6.0}},
          {"lambda", {1.0}},
          {"subsample", {1.0}},
          {"min_samples_leaf", {1.0}},
          {"sampling", {0.0, true}}}},  // only accepted value: "uniform"
        {Algorithm::chance_baseline, {}},
    };
    return table.at(a);
}

}  // namespace spec_detail

class ModelSpec {
public:
    Algorithm algorithm = Algorithm::chance_baseline;
    HyperMap hyperparameters;
    uint64_t seed = 0;

    ModelSpec() = default;

    explicit ModelSpec(Algorithm alg, HyperMap hyper = {}, uint64_t seed_value = 0)
        : algorithm(alg), hyperparameters(std::move(hyper)), seed(seed_value) {
        validate();
    }

    // Resolved numeric hyperparameter (explicit value or documented default).
    double number(const std::string& key) const {
        const auto& allowed = spec_detail::allowed_keys(algorithm);
        auto spec_it = allowed.find(key);
        if (spec_it == allowed.end() || spec_it->second.is_text) {
            throw Error("no numeric hyperparameter '" + key + "' for " + algorithm_name(algorithm));
        }
        auto it = hyperparameters.find(key);
        if (it == hyperparameters.end()) return spec_it->second.default_value;
        return std::get<double>(it->second);
    }

    void validate() const {
        const auto& allowed = spec_detail::allowed_keys(algorithm);
        for (const auto& [key, value] : hyperparameters) {
            auto it = allowed.find(key);
            if (it == allowed.end()) {
                throw ValidationError("unknown hyperparameter '" + key + "' for " +
                                      algorithm_name(algorithm));
            }
            if (it->second.is_text != std::holds_alternative<std::string>(value)) {
                throw ValidationError("hyperparameter '" + key + "' has the wrong value type");
            }
        }
        if (algorithm == Algorithm::gradient_boosted_trees) {
            auto it = hyperparameters.find("sampling");
            if (it != hyperparameters.end() && std::get<std::string>(it->second) != "uniform") {
                throw ValidationError("gradient_boosted_trees sampling must be 'uniform'");
            }
        }
        check_positive("tol");
        check_positive("lambda");
        check_positive("learning_rate");
        check_at_least("max_iter", 1);
        check_at_least("epochs", 1);
        check_at_least("n_estimators", 1);
        check_at_least("n_rounds", 1);
        check_at_least("min_samples_leaf", 1);
        // max_depth 0 means "unlimited" for classification trees; boosted
        // trees are depth-limited by construction, so require >= 1 there.
        check_at_least("max_depth", algorithm == Algorithm::gradient_boosted_trees ? 1 : 0);
        check_at_least("mtry", 0);
        if (algorithm == Algorithm::logistic_regression && number("l2") < 0.0) {
            throw ValidationError("l2 must be >= 0");
        }
        if (algorithm == Algorithm::gradient_boosted_trees) {
            double s = number("subsample");
            if (!(s > 0.0 && s <= 1.0)) throw ValidationError("subsample must be in (0, 1]");
        }
    }

private:
    void check_positive(const std::string& key) const {
        if (!spec_detail::allowed_keys(algorithm).count(key)) return;
        if (!(number(key) > 0.0)) throw ValidationError(key + " must be > 0");
    }
    void check_at_least(const std::string& key, long lo) const {
        const auto& allowed = spec_detail::allowed_keys(algorithm);
        auto it = allowed.find(key);
        if (it == allowed.end() || it->second.is_text) return;
        double v = number(key);
        if (v < static_cast<double>(lo) || v != std::floor(v)) {
            throw ValidationError(key + " must be an integer >= " + std::to_string(lo));
        }
    }
};

inline void to_json(nlohmann::json& j, const ModelSpec& s) {
    nlohmann::json hyper = nlohmann::json::object();
    for (const auto& [key, value] : s.hyperparameters) {
        if (std::holds_alternative<double>(value)) {
            hyper[key] = std::get<double>(value);
        } else {
            hyper[key] = std::get<std::string>(value);
        }
    }
    j = {{"algorithm", algorithm_name(s.algorithm)}, {"hyperparameters", hyper}, {"seed", s.seed}};
}

inline void from_json(const nlohmann::json& j, ModelSpec& s) {
    HyperMap hyper;
    for (const auto& [key, value] : j.at("hyperparameters").items()) {
        if (value.is_string()) {
            hyper[key] = value.get<std::string>();
        } else if (value.is_number()) {
            hyper[key] = value.get<double>();
        } else {
            throw ValidationError("hyperparameter '" + key + "' must be a number or string");
        }
    }
    s = ModelSpec(algorithm_from_name(j.at("algorithm").get<std::string>()), std::move(hyper),
                  j.at("seed").get<uint64_t>());
}

// =====================================================================
// Shared numerics
// =====================================================================

inline double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    double e = std::exp(t);
    return e / (1.0 + e);
}

inline double softplus(double t) {
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// Mean L2-regularized negative log-likelihood; the bias is not penalized.
// Exposed so tests can finite-difference the analytic gradient.
inline double logistic_objective(const Matrix& X, const std::vector<int>& y,
                                 std::span<const double> w, double bias, double l2) {
    double loss = 0.0;
    for (size_t i = 0; i < X.rows; ++i) {
        auto xi = X.row(i);
        double z = bias;
        for (size_t j = 0; j < X.cols; ++j) z += w[j] * xi[j];
        loss += y[i] == 1 ? softplus(-z) : softplus(z);
    }
    loss /= static_cast<double>(X.rows);
    double reg = 0.0;
    for (size_t j = 0; j < X.cols; ++j) reg += w[j] * w[j];
    return loss + 0.5 * l2 * reg;
}

inline void logistic_gradient(const Matrix& X, const std::vector<int>& y,
                              std::span<const double> w, double bias, double l2,
                              std::vector<double>& grad_w, double& grad_b) {
    grad_w.assign(X.cols, 0.0);
    grad_b = 0.0;
    for (size_t i = 0; i < X.rows; ++i) {
        auto xi = X.row(i);
        double z = bias;
        for (size_t j = 0; j < X.cols; ++j) z += w[j] * xi[j];
        double r = sigmoid(z) - static_cast<double>(y[i]);
        grad_b += r;
        for (size_t j = 0; j < X.cols; ++j) grad_w[j] += r * xi[j];
    }
    double inv_n = 1.0 / static_cast<double>(X.rows);
    grad_b *= inv_n;
    for (size_t j = 0; j < X.cols; ++j) grad_w[j] = grad_w[j] * inv_n + l2 * w[j];
}

// =====================================================================
// TrainedModel
// =====================================================================

struct FitDiagnostics {
    std::vector<double> round_losses;  // gbt: training loss before round 1, then per round
    std::vector<double> stump_errors;  // adaboost: weighted error of each kept stump
    long iterations = 0;               // logistic: gradient steps taken
};

class TrainedModel {
public:
    ModelSpec spec;
    size_t feature_count = 0;
    std::vector<std::string> feature_names;  // optional annotation for serialization

    std::vector<double> weights;  // linear models
    double bias = 0.0;
    std::vector<Tree> trees;           // tree / ensembles / gbt
    std::vector<double> alphas;        // adaboost stump weights
    std::vector<double> raw_importance;  // accumulated split gain per feature

    FitDiagnostics diagnostics;

    bool margin_scored() const { return spec.algorithm == Algorithm::linear_svm; }

    double score_one(std::span<const double> x) const {
        switch (spec.algorithm) {
            case Algorithm::chance_baseline:
                return 1.0;
            case Algorithm::logistic_regression:
                return sigmoid(linear_raw(x));
            case Algorithm::linear_svm:
                return linear_raw(x);
            case Algorithm::decision_tree:
                return trees[0].predict(x);
            case Algorithm::bagging:
            case Algorithm::random_forest: {
                double votes = 0.0;
                for (const Tree& t : trees) votes += t.predict_class(x);
                return votes / static_cast<double>(trees.size());
            }
            case Algorithm::adaboost: {
                double total = 0.0, positive = 0.0;
                for (size_t t = 0; t < trees.size(); ++t) {
                    total += alphas[t];
                    if (trees[t].predict_class(x) == 1) positive += alphas[t];
                }
                return total > 0.0 ? positive / total : 0.5;
            }
            case Algorithm::gradient_boosted_trees: {
                double raw = 0.0;
                for (const Tree& t : trees) raw += t.predict(x);
                return sigmoid(raw);
            }
        }
        throw Error("unreachable algorithm tag");
    }

    std::vector<double> predict_scores(const Matrix& X) const {
        check_shape(X);
        std::vector<double> out(X.rows);
        for (size_t i = 0; i < X.rows; ++i) out[i] = score_one(X.row(i));
        return out;
    }

    // Strictly above threshold => positive; exactly at it => negative.
    std::vector<int> predict_labels(const Matrix& X) const {
        double threshold = margin_scored() ? 0.0 : 0.5;
        std::vector<double> scores = predict_scores(X);
        std::vector<int> out(scores.size());
        for (size_t i = 0; i < scores.size(); ++i) out[i] = scores[i] > threshold ? 1 : 0;
        return out;
    }

    // Tree models: split-gain totals; linear models: |weight|. Normalized to
    // sum 1 (all-zero when the model never split / all weights are zero).
    std::vector<double> feature_importances() const {
        if (spec.algorithm == Algorithm::chance_baseline) {
            throw UnsupportedError("chance_baseline has no feature importances");
        }
        std::vector<double> imp(feature_count, 0.0);
        if (spec.algorithm == Algorithm::logistic_regression ||
            spec.algorithm == Algorithm::linear_svm) {
            for (size_t j = 0; j < feature_count; ++j) imp[j] = std::fabs(weights[j]);
        } else {
            imp = raw_importance;
        }
        double total = 0.0;
        for (double v : imp) total += v;
        if (total > 0.0) {
            for (double& v : imp) v /= total;
        }
        return imp;
    }

    void check_shape(const Matrix& X) const {
        if (X.cols != feature_count) {
            throw ValidationError("prediction input has " + std::to_string(X.cols) +
                                  " features, model expects " + std::to_string(feature_count));
        }
    }

private:
    double linear_raw(std::span<const double> x) const {
        double z = bias;
        for (size_t j = 0; j < feature_count; ++j) z += weights[j] * x[j];
        return z;
    }
};

// =====================================================================
// Fitting
// =====================================================================

namespace fit_detail {

inline void fit_logistic(const Matrix& X, const std::vector<int>& y, TrainedModel& m) {
    double l2 = m.spec.number("l2");
    double tol = m.spec.number("tol");
    long max_iter = static_cast<long>(m.spec.number("max_iter"));
    size_t nf = X.cols;
    std::vector<double> w(nf, 0.0), grad_w(nf, 0.0), trial(nf, 0.0);
    double b = 0.0, grad_b = 0.0;
    long iters = 0;
    for (; iters < max_iter; ++iters) {
        logistic_gradient(X, y, w, b, l2, grad_w, grad_b);
        double ginf = std::fabs(grad_b);
        for (double g : grad_w) ginf = std::max(ginf, std::fabs(g));
        if (ginf < tol) break;
        double f0 = logistic_objective(X, y, w, b, l2);
        double gsq = grad_b * grad_b;
        for (double g : grad_w) gsq += g * g;
        // Backtracking with Armijo c = 1e-4 along the steepest-descent direction.
        double step = 1.0;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving) {
            for (size_t j = 0; j < nf; ++j) trial[j] = w[j] - step * grad_w[j];
            double trial_b = b - step * grad_b;
            if (logistic_objective(X, y, trial, trial_b, l2) <= f0 - 1e-4 * step * gsq) {
                w = trial;
                b = trial_b;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: converged to working precision
    }
    m.weights = std::move(w);
    m.bias = b;
    m.diagnostics.iterations = iters;
}

inline void fit_svm(const Matrix& X, const std::vector<int>& y, TrainedModel& m) {
    double lambda = m.spec.number("lambda");
    long epochs = static_cast<long>(m.spec.number("epochs"));
    size_t n = X.rows, nf = X.cols;
    std::vector<double> w(nf, 0.0), w_sum(nf, 0.0);
    double b = 0.0, b_sum = 0.0;
    Rng rng(derive_seed(m.spec.seed, 0));
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    uint64_t t = 0;
    for (long epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (size_t i : order) {
            ++t;
            double eta = 1.0 / (lambda * static_cast<double>(t));
            auto xi = X.row(i);
            double s = y[i] == 1 ? 1.0 : -1.0;
            double z = b;
            for (size_t j = 0; j < nf; ++j) z += w[j] * xi[j];
            double decay = 1.0 - eta * lambda;
            for (size_t j = 0; j < nf; ++j) w[j] *= decay;
            if (s * z < 1.0) {
                for (size_t j = 0; j < nf; ++j) w[j] += eta * s * xi[j];
                b += eta * s;  // bias stays unregularized
            }
            for (size_t j = 0; j < nf; ++j) w_sum[j] += w[j];
            b_sum += b;
        }
    }
    double inv_t = 1.0 / static_cast<double>(t);
    for (size_t j = 0; j < nf; ++j) w_sum[j] *= inv_t;
    m.weights = std::move(w_sum);
    m.bias = b_sum * inv_t;
}

inline ClassificationTreeParams tree_params(const ModelSpec& spec) {
    ClassificationTreeParams p;
    p.max_depth = static_cast<int>(spec.number("max_depth"));
    p.min_samples_leaf = static_cast<long>(spec.number("min_samples_leaf"));
    return p;
}

inline void fit_tree(const Matrix& X, const std::vector<int>& y, TrainedModel& m) {
    std::vector<double> unit(X.rows, 1.0);
    m.raw_importance.assign(X.cols, 0.0);
    ClassificationTreeBuilder builder(X, y, unit, tree_params(m.spec), nullptr,
                                      &m.raw_importance);
    std::vector<size_t> all(X.rows);
    for (size_t i = 0; i < X.rows; ++i) all[i] = i;
    m.trees.push_back(builder.build(std::move(all)));
}

inline void fit_bagged(const Matrix& X, const std::vector<int>& y, TrainedModel& m) {
    bool forest = m.spec.algorithm == Algorithm::random_forest;
    long n_estimators = static_cast<long>(m.spec.number("n_estimators"));
    ClassificationTreeParams params = tree_params(m.spec);
    if (forest) {
        size_t mtry = static_cast<size_t>(m.spec.number("mtry"));
        params.mtry = mtry > 0 ? mtry
                               : static_cast<size_t>(
                                     std::ceil(std::sqrt(static_cast<double>(X.cols))));
    }
    std::vector<double> unit(X.rows, 1.0);
    m.raw_importance.assign(X.cols, 0.0);
    for (long t = 0; t < n_estimators; ++t) {
        Rng rng(derive_seed(m.spec.seed, static_cast<uint64_t>(t)));
        std::vector<size_t> idx = rng.bootstrap(X.rows);
        ClassificationTreeBuilder builder(X, y, unit, params, &rng, &m.raw_importance);
        m.trees.push_back(builder.build(std::move(idx)));
    }
}

inline void fit_adaboost(const Matrix& X, const std::vector<int>& y, TrainedModel& m) {
    long n_rounds = static_cast<long>(m.spec.number("n_rounds"));
    size_t n = X.rows;
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    m.raw_importance.assign(X.cols, 0.0);
    ClassificationTreeParams params;
    params.max_depth = 1;
    std::vector<size_t> all(n);
    for (size_t i = 0; i < n; ++i) all[i] = i;
    for (long round = 0; round < n_rounds; ++round) {
        ClassificationTreeBuilder builder(X, y, w, params, nullptr, &m.raw_importance);
        Tree stump = builder.build(all);
        double err = 0.0;
        std::vector<int> miss(n, 0);
        for (size_t i = 0; i < n; ++i) {
            miss[i] = stump.predict_class(X.row(i)) != y[i] ? 1 : 0;
            if (miss[i]) err += w[i];
        }
        if (err <= 0.0) {  // perfect stump: keep it with unit weight and stop
            m.trees.push_back(std::move(stump));
            m.alphas.push_back(1.0);
            m.diagnostics.stump_errors.push_back(0.0);
            break;
        }
        if (err >= 0.5) break;  // no stump better than chance under these weights
        double alpha = std::log((1.0 - err) / err);
        m.trees.push_back(std::move(stump));
        m.alphas.push_back(alpha);
        m.diagnostics.stump_errors.push_back(err);
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            if (miss[i]) w[i] *= std::exp(alpha);
            total += w[i];
        }
        for (size_t i = 0; i < n; ++i) w[i] /= total;
    }
}

inline void fit_gbt(const Matrix& X, const std::vector<int>& y, TrainedModel& m) {
    long n_rounds = static_cast<long>(m.spec.number("n_rounds"));
    double subsample = m.spec.number("subsample");
    RegressionTreeParams params;
    params.max_depth = static_cast<int>(m.spec.number("max_depth"));
    params.min_samples_leaf = static_cast<long>(m.spec.number("min_samples_leaf"));
    params.lambda = m.spec.number("lambda");
    params.shrinkage = m.spec.number("learning_rate");

    size_t n = X.rows;
    std::vector<double> raw(n, 0.0), grad(n), hess(n);
    m.raw_importance.assign(X.cols, 0.0);
    auto mean_loss = [&] {
        double loss = 0.0;
        for (size_t i = 0; i < n; ++i) {
            loss += y[i] == 1 ? softplus(-raw[i]) : softplus(raw[i]);
        }
        return loss / static_cast<double>(n);
    };
    m.diagnostics.round_losses.push_back(mean_loss());
    for (long round = 0; round < n_rounds; ++round) {
        for (size_t i = 0; i < n; ++i) {
            double p = sigmoid(raw[i]);
            grad[i] = p - static_cast<double>(y[i]);
            hess[i] = p * (1.0 - p);
        }
        std::vector<size_t> idx;
        if (subsample < 1.0) {
            size_t keep = std::max<size_t>(
                1, static_cast<size_t>(std::llround(subsample * static_cast<double>(n))));
            Rng rng(derive_seed(m.spec.seed, static_cast<uint64_t>(round)));
            idx = rng.sample_without_replacement(n, keep);
        } else {
            idx.resize(n);
            for (size_t i = 0; i < n; ++i) idx[i] = i;
        }
        RegressionTreeBuilder builder(X, grad, hess, params, &m.raw_importance);
        Tree tree = builder.build(std::move(idx));
        for (size_t i = 0; i < n; ++i) raw[i] += tree.predict(X.row(i));
        m.trees.push_back(std::move(tree));
        m.diagnostics.round_losses.push_back(mean_loss());
    }
}

}  // namespace fit_detail

inline TrainedModel fit(const ModelSpec& spec, const Matrix& X, const std::vector<int>& y) {
    spec.validate();
    if (X.rows != y.size()) throw ValidationError("fit: rows(X) != len(y)");
    if (X.rows == 0) throw ValidationError("fit: empty training set");
    for (double v : X.data) {
        if (!std::isfinite(v)) throw ValidationError("fit: non-finite feature value");
    }
    bool has_pos = false, has_neg = false;
    for (int label : y) {
        if (label != 0 && label != 1) throw ValidationError("fit: labels must be 0 or 1");
        (label == 1 ? has_pos : has_neg) = true;
    }
    if (spec.algorithm != Algorithm::chance_baseline && (!has_pos || !has_neg)) {
        throw ValidationError("fit: degenerate labels (one class absent)");
    }

    TrainedModel m;
    m.spec = spec;
    m.feature_count = X.cols;
    switch (spec.algorithm) {
        case Algorithm::chance_baseline: break;
        case Algorithm::logistic_regression: fit_detail::fit_logistic(X, y, m); break;
        case Algorithm::linear_svm: fit_detail::fit_svm(X, y, m); break;
        case Algorithm::decision_tree: fit_detail::fit_tree(X, y, m); break;
        case Algorithm::bagging:
        case Algorithm::random_forest: fit_detail::fit_bagged(X, y, m); break;
        case Algorithm::adaboost: fit_detail::fit_adaboost(X, y, m); break;
        case Algorithm::gradient_boosted_trees: fit_detail::fit_gbt(X, y, m); break;
    }
    return m;
}

// =====================================================================
// Serialization (self-describing, bit-exact reload via shortest-repr doubles)
// =====================================================================

inline void to_json(nlohmann::json& j, const Tree& t) {
    j = nlohmann::json::array();
    for (const TreeNode& node : t.nodes) {
        j.push_back({{"f", node.feature},
                     {"t", node.threshold},
                     {"l", node.left},
                     {"r", node.right},
                     {"v", node.value}});
    }
}

inline void from_json(const nlohmann::json& j, Tree& t) {
    t.nodes.clear();
    for (const auto& node : j) {
        t.nodes.push_back({node.at("f").get<int>(), node.at("t").get<double>(),
                           node.at("l").get<int>(), node.at("r").get<int>(),
                           node.at("v").get<double>()});
    }
}

inline void to_json(nlohmann::json& j, const TrainedModel& m) {
    j = {{"format", "empath-model"},
         {"version", 1},
         {"spec", m.spec},
         {"feature_count", m.feature_count},
         {"feature_names", m.feature_names},
         {"weights", m.weights},
         {"bias", m.bias},
         {"trees", m.trees},
         {"alphas", m.alphas},
         {"raw_importance", m.raw_importance},
         {"diagnostics",
          {{"round_losses", m.diagnostics.round_losses},
           {"stump_errors", m.diagnostics.stump_errors},
           {"iterations", m.diagnostics.iterations}}}};
}

inline void from_json(const nlohmann::json& j, TrainedModel& m) {
    if (j.value("format", "") != "empath-model") {
        throw FormatError("not an empath-model document");
    }
    m.spec = j.at("spec").get<ModelSpec>();
    m.feature_count = j.at("feature_count").get<size_t>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.trees = j.at("trees").get<std::vector<Tree>>();
    m.alphas = j.at("alphas").get<std::vector<double>>();
    m.raw_importance = j.at("raw_importance").get<std::vector<double>>();
    const auto& d = j.at("diagnostics");
    m.diagnostics.round_losses = d.at("round_losses").get<std::vector<double>>();
    m.diagnostics.stump_errors = d.at("stump_errors").get<std::vector<double>>();
    m.diagnostics.iterations = d.at("iterations").get<long>();
}

inline std::string serialize_model(const TrainedModel& m) {
    return nlohmann::json(m).dump();
}

inline TrainedModel deserialize_model(const std::string& text) {
    return nlohmann::json::parse(text).get<TrainedModel>();
}

}  // namespace empath::learn
