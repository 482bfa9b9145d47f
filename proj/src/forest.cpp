#include "aeslab/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "aeslab/parallel.hpp"
#include "aeslab/rng.hpp"

namespace aeslab {

std::size_t feature_arity(FeatureMode mode) {
    return mode == FeatureMode::TimeOnly ? 1 : 1 + kBlockSize;
}

FeatureVector extract_features(const EncryptionRecord& record, FeatureMode mode) {
    FeatureVector fv;
    fv.label = record.anomaly.is_anomalous();
    fv.values.reserve(feature_arity(mode));
    fv.values.push_back(static_cast<double>(record.duration_ns));
    if (mode == FeatureMode::TimePlusPlaintext) {
        for (std::uint8_t b : record.plaintext) fv.values.push_back(b);
    } else if (mode == FeatureMode::TimePlusCiphertext) {
        for (std::uint8_t b : record.ciphertext) fv.values.push_back(b);
    }
    return fv;
}

std::vector<FeatureVector> extract_dataset(std::span<const EncryptionRecord> records,
                                           FeatureMode mode) {
    std::vector<FeatureVector> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(extract_features(r, mode));
    return out;
}

TrainTestSplit split_train_test(std::span<const FeatureVector> dataset, double test_fraction,
                                std::uint64_t seed) {
    if (dataset.empty()) {
        throw std::invalid_argument("cannot split an empty dataset");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("test_fraction must be in (0, 1), got " +
                                    std::to_string(test_fraction));
    }

    std::vector<std::size_t> negatives;
    std::vector<std::size_t> positives;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        (dataset[i].label ? positives : negatives).push_back(i);
    }

    TrainTestSplit split;
    split.stratified = negatives.size() >= 2 && positives.size() >= 2;

    SplitMix64 rng(domain_seed(seed, SeedDomain::TrainTestSplit));
    auto take = [&](std::vector<std::size_t>& pool) {
        rng.shuffle(pool);
        const auto k = static_cast<std::size_t>(
            std::llround(test_fraction * static_cast<double>(pool.size())));
        split.test_indices.insert(split.test_indices.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        split.train_indices.insert(split.train_indices.end(), pool.begin() + static_cast<std::ptrdiff_t>(k), pool.end());
    };

    if (split.stratified) {
        take(negatives);  // strata in label order: benign first, then anomalous
        take(positives);
    } else {
        std::vector<std::size_t> all(dataset.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        take(all);
    }
    std::sort(split.train_indices.begin(), split.train_indices.end());
    std::sort(split.test_indices.begin(), split.test_indices.end());
    return split;
}

std::vector<FeatureVector> subset(std::span<const FeatureVector> dataset,
                                  std::span<const std::size_t> indices) {
    std::vector<FeatureVector> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(dataset[i]);
    return out;
}

double gini_impurity(std::uint64_t count_false, std::uint64_t count_true) {
    const std::uint64_t total = count_false + count_true;
    if (total == 0) {
        throw std::invalid_argument("gini impurity undefined for an empty node");
    }
    const double p0 = static_cast<double>(count_false) / static_cast<double>(total);
    const double p1 = static_cast<double>(count_true) / static_cast<double>(total);
    return 1.0 - p0 * p0 - p1 * p1;
}

namespace {

struct ValueLabel {
    double value;
    bool label;
};

// Core sweep shared by public best_split and tree growth: samples given as
// indices into the dataset.
std::optional<SplitCandidate> best_split_indexed(std::span<const FeatureVector> dataset,
                                                 std::span<const std::size_t> sample_indices,
                                                 std::span<const std::size_t> candidate_features) {
    const std::size_t n = sample_indices.size();
    if (n < 2) return std::nullopt;

    std::uint64_t parent_false = 0, parent_true = 0;
    for (std::size_t i : sample_indices) {
        (dataset[i].label ? parent_true : parent_false)++;
    }
    const double parent_gini = gini_impurity(parent_false, parent_true);
    const double total = static_cast<double>(n);

    std::optional<SplitCandidate> best;
    double best_gain = 0.0;  // strictly positive gain required

    std::vector<ValueLabel> column(n);
    for (std::size_t feature : candidate_features) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto& sample = dataset[sample_indices[k]];
            column[k] = {sample.values[feature], sample.label};
        }
        std::sort(column.begin(), column.end(),
                  [](const ValueLabel& a, const ValueLabel& b) { return a.value < b.value; });

        std::uint64_t left_false = 0, left_true = 0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
            (column[k].label ? left_true : left_false)++;
            if (column[k].value == column[k + 1].value) continue;  // no midpoint here

            const std::uint64_t right_false = parent_false - left_false;
            const std::uint64_t right_true = parent_true - left_true;
            const double left_n = static_cast<double>(left_false + left_true);
            const double right_n = static_cast<double>(right_false + right_true);
            const double weighted = (left_n * gini_impurity(left_false, left_true) +
                                     right_n * gini_impurity(right_false, right_true)) /
                                    total;
            const double gain = parent_gini - weighted;
            if (gain > best_gain) {
                best_gain = gain;
                best = SplitCandidate{feature, (column[k].value + column[k + 1].value) / 2.0, gain};
            }
        }
    }
    return best;
}

}  // namespace

std::optional<SplitCandidate> best_split(std::span<const FeatureVector> samples,
                                         std::span<const std::size_t> candidate_features) {
    std::vector<std::size_t> all(samples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return best_split_indexed(samples, all, candidate_features);
}

void ForestHyperparams::validate() const {
    if (tree_count == 0 || tree_count % 2 == 0) {
        throw std::invalid_argument("tree_count must be odd and >= 1, got " +
                                    std::to_string(tree_count));
    }
    if (max_depth == 0) {
        throw std::invalid_argument("max_depth must be >= 1");
    }
    if (min_samples_split < 2) {
        throw std::invalid_argument("min_samples_split must be >= 2");
    }
}

bool DecisionTree::predict(std::span<const double> features) const {
    std::size_t at = 0;
    while (!nodes[at].is_leaf()) {
        const TreeNode& node = nodes[at];
        at = static_cast<std::size_t>(features[static_cast<std::size_t>(node.feature)] <=
                                              node.threshold
                                          ? node.left
                                          : node.right);
    }
    return nodes[at].label;
}

bool ForestModel::predict(std::span<const double> features) const {
    if (features.size() != arity) {
        throw std::invalid_argument("feature arity mismatch: model expects " +
                                    std::to_string(arity) + ", got " +
                                    std::to_string(features.size()));
    }
    std::size_t votes_true = 0;
    for (const auto& tree : trees) {
        if (tree.predict(features)) ++votes_true;
    }
    return votes_true * 2 > trees.size();
}

namespace {

struct TreeBuilder {
    std::span<const FeatureVector> dataset;
    const ForestHyperparams& params;
    std::size_t arity;
    std::size_t features_per_split;
    SplitMix64& rng;
    DecisionTree tree;

    // DFS, left child first; every random draw happens in this fixed order.
    std::int32_t grow(std::vector<std::size_t>& indices, std::uint32_t depth) {
        std::uint64_t count_false = 0, count_true = 0;
        for (std::size_t i : indices) {
            (dataset[i].label ? count_true : count_false)++;
        }

        const auto node_id = static_cast<std::int32_t>(tree.nodes.size());
        TreeNode node;
        node.count_false = count_false;
        node.count_true = count_true;
        node.label = count_true > count_false;  // tie predicts benign

        const bool pure = count_false == 0 || count_true == 0;
        if (pure || depth >= params.max_depth || indices.size() < params.min_samples_split) {
            tree.nodes.push_back(node);
            return node_id;
        }

        const auto candidates = rng.sample_indices(arity, features_per_split);
        const auto split = best_split_indexed(dataset, indices, candidates);
        if (!split) {
            tree.nodes.push_back(node);
            return node_id;
        }

        std::vector<std::size_t> left_indices, right_indices;
        left_indices.reserve(indices.size());
        right_indices.reserve(indices.size());
        for (std::size_t i : indices) {
            (dataset[i].values[split->feature] <= split->threshold ? left_indices : right_indices)
                .push_back(i);
        }

        node.feature = static_cast<std::int32_t>(split->feature);
        node.threshold = split->threshold;
        tree.nodes.push_back(node);
        indices.clear();
        indices.shrink_to_fit();

        const std::int32_t left = grow(left_indices, depth + 1);
        const std::int32_t right = grow(right_indices, depth + 1);
        tree.nodes[static_cast<std::size_t>(node_id)].left = left;
        tree.nodes[static_cast<std::size_t>(node_id)].right = right;
        return node_id;
    }
};

DecisionTree train_tree(std::span<const FeatureVector> train, const ForestHyperparams& params,
                        std::size_t arity, std::size_t features_per_split, std::uint64_t tree_seed) {
    SplitMix64 rng(tree_seed);

    std::vector<std::size_t> indices(train.size());
    if (params.bootstrap) {
        for (auto& i : indices) i = static_cast<std::size_t>(rng.next_below(train.size()));
    } else {
        for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    }

    TreeBuilder builder{train, params, arity, features_per_split, rng, {}};
    builder.grow(indices, 0);
    return std::move(builder.tree);
}

}  // namespace

ForestModel train_forest(std::span<const FeatureVector> train, const ForestHyperparams& params,
                         FeatureMode mode, std::uint64_t seed, unsigned worker_count) {
    params.validate();
    if (train.empty()) {
        throw std::invalid_argument("cannot train on an empty dataset");
    }
    const std::size_t arity = train.front().values.size();
    for (const auto& sample : train) {
        if (sample.values.size() != arity) {
            throw std::invalid_argument("inconsistent feature arity in training set");
        }
    }

    ForestModel model;
    model.hyperparams = params;
    model.feature_mode = mode;
    model.arity = arity;
    model.training_seed = seed;

    std::size_t features_per_split = params.features_per_split;
    if (features_per_split == 0) {
        features_per_split =
            static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(arity))));
    }
    features_per_split = std::clamp<std::size_t>(features_per_split, 1, arity);

    const std::uint64_t tree_base = domain_seed(seed, SeedDomain::TreeStream);
    model.trees.resize(params.tree_count);
    parallel_for_index(params.tree_count, worker_count, [&](std::uint64_t t) {
        model.trees[t] = train_tree(train, params, arity, features_per_split,
                                    derive_seed(tree_base, t));
    });
    return model;
}

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kModelFormat = "aeslab-forest";
constexpr int kModelVersion = 1;

ordered_json tree_to_json(const DecisionTree& tree) {
    // Columnar layout keeps large ensembles compact. Arrays are built as
    // locals first: ordered_json is vector-backed, so references into it
    // would not survive later key insertions.
    auto feature = ordered_json::array();
    auto threshold = ordered_json::array();
    auto left = ordered_json::array();
    auto right = ordered_json::array();
    auto label = ordered_json::array();
    auto count_false = ordered_json::array();
    auto count_true = ordered_json::array();
    for (const auto& n : tree.nodes) {
        feature.push_back(n.feature);
        threshold.push_back(n.threshold);
        left.push_back(n.left);
        right.push_back(n.right);
        label.push_back(n.label);
        count_false.push_back(n.count_false);
        count_true.push_back(n.count_true);
    }
    ordered_json t;
    t["feature"] = std::move(feature);
    t["threshold"] = std::move(threshold);
    t["left"] = std::move(left);
    t["right"] = std::move(right);
    t["label"] = std::move(label);
    t["count_false"] = std::move(count_false);
    t["count_true"] = std::move(count_true);
    return t;
}

DecisionTree tree_from_json(const ordered_json& t, std::size_t arity) {
    DecisionTree tree;
    const auto& feature = t.at("feature");
    const std::size_t n = feature.size();
    tree.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        TreeNode& node = tree.nodes[i];
        node.feature = feature.at(i).get<std::int32_t>();
        node.threshold = t.at("threshold").at(i).get<double>();
        node.left = t.at("left").at(i).get<std::int32_t>();
        node.right = t.at("right").at(i).get<std::int32_t>();
        node.label = t.at("label").at(i).get<bool>();
        node.count_false = t.at("count_false").at(i).get<std::uint64_t>();
        node.count_true = t.at("count_true").at(i).get<std::uint64_t>();
        if (!node.is_leaf()) {
            const bool feature_ok = node.feature >= 0 &&
                                    static_cast<std::size_t>(node.feature) < arity;
            const bool children_ok = node.left > 0 && node.right > 0 &&
                                     static_cast<std::size_t>(node.left) < n &&
                                     static_cast<std::size_t>(node.right) < n;
            if (!feature_ok || !children_ok) {
                throw std::runtime_error("corrupt model: node " + std::to_string(i) +
                                         " is out of range");
            }
        }
    }
    return tree;
}

}  // namespace

void save_model(const ForestModel& model, const std::filesystem::path& path) {
    ordered_json j;
    j["format"] = kModelFormat;
    j["version"] = kModelVersion;
    j["feature_mode"] = to_string(model.feature_mode);
    j["feature_arity"] = model.arity;
    j["training_seed"] = model.training_seed;
    j["hyperparams"] = {{"tree_count", model.hyperparams.tree_count},
                        {"max_depth", model.hyperparams.max_depth},
                        {"min_samples_split", model.hyperparams.min_samples_split},
                        {"features_per_split", model.hyperparams.features_per_split},
                        {"bootstrap", model.hyperparams.bootstrap}};
    auto& trees = j["trees"] = ordered_json::array();
    for (const auto& tree : model.trees) trees.push_back(tree_to_json(tree));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open model file for writing: " + path.string());
    }
    out << j.dump() << '\n';
    if (!out.flush()) {
        throw std::runtime_error("failed writing model file: " + path.string());
    }
}

ForestModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open model file: " + path.string());
    }
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("cannot parse model file " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != kModelFormat || j.value("version", -1) != kModelVersion) {
        throw std::runtime_error("unrecognized model format in " + path.string());
    }

    ForestModel model;
    model.feature_mode = feature_mode_from_string(j.at("feature_mode").get<std::string>());
    model.arity = j.at("feature_arity").get<std::size_t>();
    model.training_seed = j.at("training_seed").get<std::uint64_t>();
    const auto& hp = j.at("hyperparams");
    model.hyperparams.tree_count = hp.at("tree_count").get<std::uint32_t>();
    model.hyperparams.max_depth = hp.at("max_depth").get<std::uint32_t>();
    model.hyperparams.min_samples_split = hp.at("min_samples_split").get<std::uint32_t>();
    model.hyperparams.features_per_split = hp.at("features_per_split").get<std::uint32_t>();
    model.hyperparams.bootstrap = hp.at("bootstrap").get<bool>();
    for (const auto& t : j.at("trees")) {
        model.trees.push_back(tree_from_json(t, model.arity));
    }
    if (model.trees.size() != model.hyperparams.tree_count) {
        throw std::runtime_error("corrupt model: tree count mismatch in " + path.string());
    }
    return model;
}

}  // namespace aeslab
