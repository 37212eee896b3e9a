#include "geocmd/forest.hpp"

#include "geocmd/rng.hpp"
#include "geocmd/svm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace geocmd {

namespace {

struct ColumnEntry {
    std::uint32_t row;
    double value;
};

using Columns = std::vector<std::vector<ColumnEntry>>;

double feature_value(const FeatureVector& x, std::uint32_t feature) {
    const auto it = std::lower_bound(x.entries.begin(), x.entries.end(), feature,
                                     [](const SparseEntry& e, std::uint32_t f) { return e.index < f; });
    return (it != x.entries.end() && it->index == feature) ? it->weight : 0.0;
}

// Weighted Gini numerator: n * gini = n - sum(c^2) / n.
double weighted_gini(const std::vector<double>& counts, double n) {
    if (n <= 0.0) return 0.0;
    double sq = 0.0;
    for (double c : counts) sq += c * c;
    return n - sq / n;
}

struct Split {
    std::int64_t feature = -1;
    double threshold = 0.0;
    double score = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Columns& columns, const std::vector<std::uint32_t>& labels, std::size_t n_classes,
                std::uint32_t n_features, const ForestOptions& options, std::uint64_t seed)
        : columns_(columns), labels_(labels), n_classes_(n_classes), n_features_(n_features),
          options_(options), rng_(seed), weight_(labels.size(), 0.0), in_node_(labels.size(), 0),
          scratch_(labels.size(), 0.0), feature_order_(n_features) {
        std::iota(feature_order_.begin(), feature_order_.end(), 0u);
        max_features_ = options.max_features == FeatureRule::All
                            ? n_features
                            : std::max<std::uint32_t>(
                                  1, static_cast<std::uint32_t>(std::sqrt(static_cast<double>(n_features))));
        max_features_ = std::min(max_features_, n_features);
    }

    DecisionTree build() {
        DecisionTree tree;
        const auto n = static_cast<std::uint32_t>(labels_.size());
        if (options_.bootstrap) {
            tree.bootstrap.resize(n);
            for (auto& r : tree.bootstrap) r = static_cast<std::uint32_t>(rng_.below(n));
        } else {
            tree.bootstrap.resize(n);
            std::iota(tree.bootstrap.begin(), tree.bootstrap.end(), 0u);
        }
        for (std::uint32_t r : tree.bootstrap) weight_[r] += 1.0;

        std::vector<std::uint32_t> rows;
        for (std::uint32_t r = 0; r < n; ++r)
            if (weight_[r] > 0.0) rows.push_back(r);

        tree_ = &tree;
        grow(std::move(rows));
        tree_ = nullptr;
        return tree;
    }

private:
    std::int32_t grow(std::vector<std::uint32_t> rows) {
        std::vector<double> counts(n_classes_, 0.0);
        double n = 0.0;
        for (std::uint32_t r : rows) {
            counts[labels_[r]] += weight_[r];
            n += weight_[r];
        }

        const auto index = static_cast<std::int32_t>(tree_->nodes.size());
        TreeNode node;
        node.impurity = gini_impurity(counts);
        node.n_samples = static_cast<std::uint32_t>(n);
        node.label = static_cast<std::uint32_t>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
        tree_->nodes.push_back(node);

        if (node.impurity <= 0.0 || n < options_.min_samples_split) return index;

        const Split split = best_split(rows, counts, n);
        if (split.feature < 0) return index;

        const auto feature = static_cast<std::uint32_t>(split.feature);
        for (const auto& e : columns_[feature]) scratch_[e.row] = e.value;
        std::vector<std::uint32_t> left, right;
        for (std::uint32_t r : rows) (scratch_[r] <= split.threshold ? left : right).push_back(r);
        for (const auto& e : columns_[feature]) scratch_[e.row] = 0.0;
        rows.clear();
        rows.shrink_to_fit();

        const std::int32_t l = grow(std::move(left));
        const std::int32_t r = grow(std::move(right));
        TreeNode& self = tree_->nodes[static_cast<std::size_t>(index)];
        self.feature = static_cast<std::int32_t>(feature);
        self.threshold = split.threshold;
        self.left = l;
        self.right = r;
        return index;
    }

    Split best_split(const std::vector<std::uint32_t>& rows, const std::vector<double>& counts, double n) {
        for (std::uint32_t r : rows) in_node_[r] = 1;

        Split best;
        std::uint32_t visited = 0;
        for (std::uint32_t t = 0; t < n_features_; ++t) {
            // Partial Fisher-Yates: uniform draw without replacement.
            const auto j = t + static_cast<std::uint32_t>(rng_.below(n_features_ - t));
            std::swap(feature_order_[t], feature_order_[j]);
            evaluate(feature_order_[t], counts, n, best);
            ++visited;
            // Keep drawing past max_features only while no valid split exists.
            if (visited >= max_features_ && best.feature >= 0) break;
        }

        for (std::uint32_t r : rows) in_node_[r] = 0;
        return best;
    }

    void evaluate(std::uint32_t feature, const std::vector<double>& counts, double n, Split& best) {
        values_.clear();
        for (const auto& e : columns_[feature])
            if (in_node_[e.row]) values_.push_back(e);
        if (values_.empty()) return;

        std::sort(values_.begin(), values_.end(), [](const ColumnEntry& a, const ColumnEntry& b) {
            return a.value < b.value || (a.value == b.value && a.row < b.row);
        });

        // Start with every row on the right, then move the zero group and
        // each run of equal values to the left.
        std::vector<double>& left = left_counts_;
        std::vector<double>& right = right_counts_;
        left.assign(n_classes_, 0.0);
        right = counts;
        double n_left = 0.0;

        double nonzero_weight = 0.0;
        for (const auto& e : values_) nonzero_weight += weight_[e.row];
        const double zero_weight = n - nonzero_weight;
        if (zero_weight > 0.0) {
            for (std::size_t k = 0; k < n_classes_; ++k) left[k] = counts[k];
            for (const auto& e : values_) left[labels_[e.row]] -= weight_[e.row];
            for (std::size_t k = 0; k < n_classes_; ++k) right[k] -= left[k];
            n_left = zero_weight;
            consider(feature, 0.0, values_.front().value, left, right, n_left, n, best);
        }

        std::size_t i = 0;
        while (i < values_.size()) {
            const double v = values_[i].value;
            while (i < values_.size() && values_[i].value == v) {
                const auto& e = values_[i];
                left[labels_[e.row]] += weight_[e.row];
                right[labels_[e.row]] -= weight_[e.row];
                n_left += weight_[e.row];
                ++i;
            }
            if (i < values_.size()) consider(feature, v, values_[i].value, left, right, n_left, n, best);
        }
    }

    void consider(std::uint32_t feature, double lo, double hi, const std::vector<double>& left,
                  const std::vector<double>& right, double n_left, double n, Split& best) const {
        const double n_right = n - n_left;
        if (n_left < options_.min_samples_leaf || n_right < options_.min_samples_leaf) return;
        const double score = weighted_gini(left, n_left) + weighted_gini(right, n_right);
        if (best.feature >= 0 && !(score < best.score)) return;
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        best = Split{feature, threshold, score};
    }

    const Columns& columns_;
    const std::vector<std::uint32_t>& labels_;
    std::size_t n_classes_;
    std::uint32_t n_features_;
    std::uint32_t max_features_ = 1;
    const ForestOptions& options_;
    Rng rng_;
    std::vector<double> weight_;
    std::vector<char> in_node_;
    std::vector<double> scratch_;
    std::vector<std::uint32_t> feature_order_;
    std::vector<ColumnEntry> values_;
    std::vector<double> left_counts_;
    std::vector<double> right_counts_;
    DecisionTree* tree_ = nullptr;
};

} // namespace

double gini_impurity(const std::vector<double>& class_counts) {
    double n = 0.0;
    for (double c : class_counts) n += c;
    if (n <= 0.0) return 0.0;
    double sq = 0.0;
    for (double c : class_counts) sq += (c / n) * (c / n);
    return std::max(0.0, 1.0 - sq);
}

std::size_t DecisionTree::leaf_index(const FeatureVector& x) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& node = nodes[i];
        i = static_cast<std::size_t>(
            feature_value(x, static_cast<std::uint32_t>(node.feature)) <= node.threshold ? node.left
                                                                                          : node.right);
    }
    return i;
}

std::uint32_t DecisionTree::leaf_label(const FeatureVector& x) const { return nodes[leaf_index(x)].label; }

std::vector<std::uint32_t> ForestModel::votes(const FeatureVector& x) const {
    if (x.dimension != vocabulary.size() ||
        (!x.entries.empty() && x.entries.back().index >= vocabulary.size()))
        throw ModelError(ModelErrorKind::DimensionMismatch,
                         "feature vector has dimension " + std::to_string(x.dimension) +
                             ", model expects " + std::to_string(vocabulary.size()));
    std::vector<std::uint32_t> out(classes.size(), 0);
    for (const DecisionTree& tree : trees) ++out[tree.leaf_label(x)];
    return out;
}

std::size_t ForestModel::predict_index(const FeatureVector& x) const {
    const auto v = votes(x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[best] || (v[k] == v[best] && classes[k] < classes[best])) best = k;
    return best;
}

ForestModel train_forest(const std::vector<FeatureVector>& x, const std::vector<std::uint32_t>& labels,
                         std::vector<std::string> classes, Vocabulary vocabulary, const ForestOptions& options) {
    if (x.size() != labels.size() || x.empty())
        throw ModelError(ModelErrorKind::InvalidArgument, "need a non-empty, label-aligned training set");
    if (classes.size() < 2)
        throw ModelError(ModelErrorKind::SingleClassTraining, "training data must contain at least two classes");
    if (options.n_trees < 1) throw ModelError(ModelErrorKind::InvalidArgument, "n_trees must be >= 1");
    if (options.min_samples_split < 2 || options.min_samples_leaf < 1)
        throw ModelError(ModelErrorKind::InvalidArgument, "min_samples_split >= 2 and min_samples_leaf >= 1");

    const std::uint32_t dim = vocabulary.size();
    Columns columns(dim);
    for (std::uint32_t r = 0; r < x.size(); ++r) {
        if (x[r].dimension != dim)
            throw ModelError(ModelErrorKind::DimensionMismatch, "training row dimension mismatch");
        for (const auto& e : x[r].entries) columns[e.index].push_back({r, e.weight});
    }

    ForestModel model;
    model.classes = std::move(classes);
    model.vocabulary = std::move(vocabulary);
    model.options = options;
    model.trees.resize(options.n_trees);

    std::atomic<std::uint32_t> next{0};
    const auto worker = [&] {
        for (std::uint32_t t = next++; t < options.n_trees; t = next++) {
            TreeBuilder builder(columns, labels, model.classes.size(), dim, options,
                                derive_seed(options.seed, t));
            model.trees[t] = builder.build();
        }
    };
    const std::uint32_t n_threads = std::clamp<std::uint32_t>(options.n_threads, 1, options.n_trees);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::uint32_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    return model;
}

ForestModel train_forest(const std::vector<Sample>& train, const ForestOptions& options) {
    std::vector<std::string> classes = class_labels(train);
    Vocabulary vocab = fit_vocabulary(train);
    std::vector<FeatureVector> x;
    std::vector<std::uint32_t> labels;
    x.reserve(train.size());
    labels.reserve(train.size());
    for (const Sample& s : train) {
        x.push_back(vocab.featurize(s.query));
        labels.push_back(static_cast<std::uint32_t>(
            std::lower_bound(classes.begin(), classes.end(), s.function) - classes.begin()));
    }
    return train_forest(x, labels, std::move(classes), std::move(vocab), options);
}

} // namespace geocmd
