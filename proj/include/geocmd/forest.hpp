#pragma once

// Random forest of unpruned CART trees with Gini splits over the TF-IDF
// features. Each tree sees a bootstrap sample of the training set and
// re-draws its candidate features at every node; trees are grown from an
// RNG stream derived from (seed, tree index), so the forest is the same no
// matter how many worker threads built it.

#include "geocmd/dataset.hpp"
#include "geocmd/features.hpp"
#include "geocmd/model_error.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace geocmd {

enum class FeatureRule { Sqrt, All };

struct ForestOptions {
    std::uint32_t n_trees = 100;
    std::uint64_t seed = 1;
    FeatureRule max_features = FeatureRule::Sqrt;
    std::uint32_t min_samples_split = 2;
    std::uint32_t min_samples_leaf = 1;
    bool bootstrap = true;
    // Training only; never affects the result.
    std::uint32_t n_threads = 1;
};

struct TreeNode {
    std::int32_t feature = -1; // -1 marks a leaf
    double threshold = 0.0;    // x[feature] <= threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t label = 0;   // class index; meaningful on leaves
    double impurity = 0.0;     // Gini impurity of the samples reaching the node
    std::uint32_t n_samples = 0;

    bool is_leaf() const noexcept { return feature < 0; }
    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    // Row indices of the tree's bootstrap sample. Kept in memory for
    // diagnostics; not part of the model file.
    std::vector<std::uint32_t> bootstrap;

    std::uint32_t leaf_label(const FeatureVector& x) const;
    std::size_t leaf_index(const FeatureVector& x) const;
};

struct ForestModel {
    std::vector<std::string> classes;
    Vocabulary vocabulary;
    std::vector<DecisionTree> trees;
    ForestOptions options;

    // One vote per tree, indexed by class.
    std::vector<std::uint32_t> votes(const FeatureVector& x) const;
    // Plurality vote; ties go to the lexicographically smallest label.
    std::size_t predict_index(const FeatureVector& x) const;
    const std::string& predict(const FeatureVector& x) const { return classes[predict_index(x)]; }
    const std::string& predict_query(std::string_view query) const {
        return predict(vocabulary.featurize(query));
    }
};

ForestModel train_forest(const std::vector<Sample>& train, const ForestOptions& options = {});

// Lower-level entry point on pre-featurized rows; labels index into classes.
ForestModel train_forest(const std::vector<FeatureVector>& x, const std::vector<std::uint32_t>& labels,
                         std::vector<std::string> classes, Vocabulary vocabulary, const ForestOptions& options);

double gini_impurity(const std::vector<double>& class_counts);

} // namespace geocmd
