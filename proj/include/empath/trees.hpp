// trees.hpp - CART machinery shared by the tree-based learners
//
// Exact greedy splits on midpoints between distinct sorted values. Ties are
// broken toward the lowest feature index, then the smallest threshold, which
// together with seeded candidate subsets makes every tree a pure function of
// (data, params, seed).
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "empath/matrix.hpp"
#include "empath/rng.hpp"

namespace empath::learn {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;  // leaf payload: positive fraction or regression weight
};

struct Tree {
    std::vector<TreeNode> nodes;  // node 0 is the root

    double predict(std::span<const double> x) const {
        int i = 0;
        while (nodes[i].feature >= 0) {
            i = x[static_cast<size_t>(nodes[i].feature)] <= nodes[i].threshold ? nodes[i].left
                                                                              : nodes[i].right;
        }
        return nodes[i].value;
    }

    // Hard class for classification trees: positive iff leaf fraction > 0.5.
    int predict_class(std::span<const double> x) const { return predict(x) > 0.5 ? 1 : 0; }
};

namespace tree_detail {

struct Split {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = -std::numeric_limits<double>::infinity();
};

inline double gini(double w_pos, double w_total) {
    if (w_total <= 0.0) return 0.0;
    double p = w_pos / w_total;
    return 2.0 * p * (1.0 - p);
}

}  // namespace tree_detail

struct ClassificationTreeParams {
    int max_depth = 0;  // 0 = unlimited
    long min_samples_leaf = 1;
    size_t mtry = 0;  // 0 = all features
};

// Weighted Gini CART. `importance` (optional, length = feature count)
// accumulates the weighted impurity decrease of every split.
class ClassificationTreeBuilder {
public:
    ClassificationTreeBuilder(const Matrix& X, const std::vector<int>& y,
                              const std::vector<double>& weights, ClassificationTreeParams params,
                              Rng* rng, std::vector<double>* importance)
        : X_(X), y_(y), w_(weights), params_(params), rng_(rng), importance_(importance) {}

    Tree build(std::vector<size_t> indices) {
        Tree t;
        grow(t, std::move(indices), 0);
        return t;
    }

private:
    int grow(Tree& t, std::vector<size_t> idx, int depth) {
        int node_id = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();

        double w_total = 0.0, w_pos = 0.0;
        bool pure = true;
        for (size_t i : idx) {
            w_total += w_[i];
            if (y_[i] == 1) w_pos += w_[i];
            if (y_[i] != y_[idx[0]]) pure = false;
        }
        double leaf_value = w_total > 0.0 ? w_pos / w_total : 0.0;

        bool depth_ok = params_.max_depth == 0 || depth < params_.max_depth;
        tree_detail::Split best;
        if (!pure && depth_ok &&
            static_cast<long>(idx.size()) >= 2 * params_.min_samples_leaf) {
            best = find_split(idx, w_total, w_pos);
        }
        if (!best.found) {
            t.nodes[node_id].value = leaf_value;
            return node_id;
        }
        if (importance_) (*importance_)[static_cast<size_t>(best.feature)] += best.gain;

        std::vector<size_t> left, right;
        for (size_t i : idx) {
            (X_.at(i, static_cast<size_t>(best.feature)) <= best.threshold ? left : right).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();
        t.nodes[node_id].feature = best.feature;
        t.nodes[node_id].threshold = best.threshold;
        int l = grow(t, std::move(left), depth + 1);
        int r = grow(t, std::move(right), depth + 1);
        t.nodes[node_id].left = l;
        t.nodes[node_id].right = r;
        return node_id;
    }

    tree_detail::Split find_split(const std::vector<size_t>& idx, double w_total, double w_pos) {
        tree_detail::Split best;
        double parent = w_total * tree_detail::gini(w_pos, w_total);

        std::vector<size_t> candidates = candidate_features();
        std::vector<std::pair<double, size_t>> sorted(idx.size());
        for (size_t f : candidates) {
            for (size_t k = 0; k < idx.size(); ++k) {
                sorted[k] = {X_.at(idx[k], f), idx[k]};
            }
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double wl = 0.0, wpl = 0.0;
            for (size_t k = 0; k + 1 < sorted.size(); ++k) {
                size_t i = sorted[k].second;
                wl += w_[i];
                if (y_[i] == 1) wpl += w_[i];
                if (sorted[k].first == sorted[k + 1].first) continue;
                long nl = static_cast<long>(k + 1);
                long nr = static_cast<long>(sorted.size()) - nl;
                if (nl < params_.min_samples_leaf || nr < params_.min_samples_leaf) continue;
                double wr = w_total - wl, wpr = w_pos - wpl;
                double gain = parent - wl * tree_detail::gini(wpl, wl) - wr * tree_detail::gini(wpr, wr);
                if (gain > best.gain) {
                    best.found = true;
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    best.threshold = sorted[k].first + 0.5 * (sorted[k + 1].first - sorted[k].first);
                }
            }
        }
        return best;
    }

    // Ascending order keeps the lowest-index tie-break meaningful for random
    // subsets too. No rng draw when the subset covers all features.
    std::vector<size_t> candidate_features() {
        size_t nf = X_.cols;
        if (params_.mtry == 0 || params_.mtry >= nf || rng_ == nullptr) {
            std::vector<size_t> all(nf);
            for (size_t i = 0; i < nf; ++i) all[i] = i;
            return all;
        }
        auto subset = rng_->sample_without_replacement(nf, params_.mtry);
        std::sort(subset.begin(), subset.end());
        return subset;
    }

    const Matrix& X_;
    const std::vector<int>& y_;
    const std::vector<double>& w_;
    ClassificationTreeParams params_;
    Rng* rng_;
    std::vector<double>* importance_;
};

struct RegressionTreeParams {
    int max_depth = 6;
    long min_samples_leaf = 1;
    double lambda = 1.0;
    double shrinkage = 1.0;  // applied to leaf weights at build time
};

// Second-order boosted regression tree: split gain
//   1/2 [ Gl^2/(Hl+l) + Gr^2/(Hr+l) - G^2/(H+l) ],
// leaf weight -G/(H+l), both the XGBoost forms. Only strictly positive gains
// split. `importance` accumulates total gain per feature.
class RegressionTreeBuilder {
public:
    RegressionTreeBuilder(const Matrix& X, const std::vector<double>& grad,
                          const std::vector<double>& hess, RegressionTreeParams params,
                          std::vector<double>* importance)
        : X_(X), g_(grad), h_(hess), params_(params), importance_(importance) {}

    Tree build(std::vector<size_t> indices) {
        Tree t;
        grow(t, std::move(indices), 0);
        return t;
    }

private:
    int grow(Tree& t, std::vector<size_t> idx, int depth) {
        int node_id = static_cast<int>(t.nodes.size());
        t.nodes.emplace_back();
        double G = 0.0, H = 0.0;
        for (size_t i : idx) {
            G += g_[i];
            H += h_[i];
        }
        tree_detail::Split best;
        if (depth < params_.max_depth &&
            static_cast<long>(idx.size()) >= 2 * params_.min_samples_leaf) {
            best = find_split(idx, G, H);
        }
        if (!best.found) {
            t.nodes[node_id].value = params_.shrinkage * (-G / (H + params_.lambda));
            return node_id;
        }
        if (importance_) (*importance_)[static_cast<size_t>(best.feature)] += best.gain;
        std::vector<size_t> left, right;
        for (size_t i : idx) {
            (X_.at(i, static_cast<size_t>(best.feature)) <= best.threshold ? left : right).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();
        t.nodes[node_id].feature = best.feature;
        t.nodes[node_id].threshold = best.threshold;
        int l = grow(t, std::move(left), depth + 1);
        int r = grow(t, std::move(right), depth + 1);
        t.nodes[node_id].left = l;
        t.nodes[node_id].right = r;
        return node_id;
    }

    tree_detail::Split find_split(const std::vector<size_t>& idx, double G, double H) {
        tree_detail::Split best;
        best.gain = 0.0;  // require strictly positive gain
        double lam = params_.lambda;
        double parent = G * G / (H + lam);
        std::vector<std::pair<double, size_t>> sorted(idx.size());
        for (size_t f = 0; f < X_.cols; ++f) {
            for (size_t k = 0; k < idx.size(); ++k) {
                sorted[k] = {X_.at(idx[k], f), idx[k]};
            }
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            double Gl = 0.0, Hl = 0.0;
            for (size_t k = 0; k + 1 < sorted.size(); ++k) {
                size_t i = sorted[k].second;
                Gl += g_[i];
                Hl += h_[i];
                if (sorted[k].first == sorted[k + 1].first) continue;
                long nl = static_cast<long>(k + 1);
                long nr = static_cast<long>(sorted.size()) - nl;
                if (nl < params_.min_samples_leaf || nr < params_.min_samples_leaf) continue;
                double Gr = G - Gl, Hr = H - Hl;
                double gain = 0.5 * (Gl * Gl / (Hl + lam) + Gr * Gr / (Hr + lam) - parent);
                if (gain > best.gain) {
                    best.found = true;
                    best.gain = gain;
                    best.feature = static_cast<int>(f);
                    best.threshold = sorted[k].first + 0.5 * (sorted[k + 1].first - sorted[k].first);
                }
            }
        }
        return best;
    }

    const Matrix& X_;
    const std::vector<double>& g_;
    const std::vector<double>& h_;
    RegressionTreeParams params_;
    std::vector<double>* importance_;
};

}  // namespace empath::learn
