#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "aeslab/harness.hpp"

namespace aeslab {

struct FeatureVector {
    std::vector<double> values;
    bool label = false;  // true = anomalous ground truth

    bool operator==(const FeatureVector&) const = default;
};

// 1 for TimeOnly, 17 (duration + 16 bytes) otherwise.
std::size_t feature_arity(FeatureMode mode);

// First feature is duration_ns as a real; byte features are 0..255.
FeatureVector extract_features(const EncryptionRecord& record, FeatureMode mode);
std::vector<FeatureVector> extract_dataset(std::span<const EncryptionRecord> records,
                                           FeatureMode mode);

struct TrainTestSplit {
    std::vector<std::size_t> train_indices;  // ascending
    std::vector<std::size_t> test_indices;   // ascending
    bool stratified = true;  // false = fell back to an unstratified split
};

// Disjoint, exhaustive, deterministic given seed. Stratified by label when
// both classes have at least 2 samples; otherwise unstratified and the
// stratified flag is cleared so reports can carry the warning.
TrainTestSplit split_train_test(std::span<const FeatureVector> dataset, double test_fraction,
                                std::uint64_t seed);

std::vector<FeatureVector> subset(std::span<const FeatureVector> dataset,
                                  std::span<const std::size_t> indices);

// 1 - p0^2 - p1^2. Throws when both counts are zero.
double gini_impurity(std::uint64_t count_false, std::uint64_t count_true);

struct SplitCandidate {
    std::size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exhaustive search over the candidate features; thresholds are midpoints
// (lo + hi) / 2 of consecutive distinct sorted values. Returns the split with
// the largest Gini gain, ties going to the lowest feature index and then the
// lowest threshold; nothing if no split has strictly positive gain.
std::optional<SplitCandidate> best_split(std::span<const FeatureVector> samples,
                                         std::span<const std::size_t> candidate_features);

struct ForestHyperparams {
    std::uint32_t tree_count = 101;  // odd, so majority votes cannot tie
    std::uint32_t max_depth = 16;
    std::uint32_t min_samples_split = 2;
    std::uint32_t features_per_split = 0;  // 0 = floor(sqrt(arity)), resolved at train time
    bool bootstrap = true;                 // test hook; leave on for real training

    void validate() const;
    bool operator==(const ForestHyperparams&) const = default;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    bool label = false;  // leaf prediction (majority; tie predicts benign)
    std::uint64_t count_false = 0;
    std::uint64_t count_true = 0;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // root at index 0; value <= threshold routes left

    bool predict(std::span<const double> features) const;
    bool operator==(const DecisionTree&) const = default;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    ForestHyperparams hyperparams;
    FeatureMode feature_mode = FeatureMode::TimePlusCiphertext;
    std::size_t arity = 0;
    std::uint64_t training_seed = 0;

    // Majority vote. Throws std::invalid_argument on arity mismatch.
    bool predict(std::span<const double> features) const;
    bool operator==(const ForestModel&) const = default;
};

// Each tree trains on a bootstrap resample drawn from its own stream
// (derived from seed and tree index), so any worker_count produces the
// identical model.
ForestModel train_forest(std::span<const FeatureVector> train, const ForestHyperparams& params,
                         FeatureMode mode, std::uint64_t seed, unsigned worker_count = 1);

// Versioned JSON flat file; see README for the schema.
void save_model(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_model(const std::filesystem::path& path);

}  // namespace aeslab
