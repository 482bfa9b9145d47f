#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "aeslab/forest.hpp"
#include "aeslab/rng.hpp"

using namespace aeslab;

namespace {

// --- Brute-force stump oracle -------------------------------------------
// Independent of the library's split search: enumerates every feature and
// every midpoint with plain partition loops. Tie-breaking mirrors the
// contract (lowest feature index, then lowest threshold) by accepting only
// strict improvements while scanning in ascending order.

double oracle_gini(std::uint64_t c0, std::uint64_t c1) {
    const double total = static_cast<double>(c0 + c1);
    const double p0 = static_cast<double>(c0) / total;
    const double p1 = static_cast<double>(c1) / total;
    return 1.0 - p0 * p0 - p1 * p1;
}

struct OracleStump {
    std::size_t feature;
    double threshold;
    double gain;
    bool left_label;   // majority of the left side; ties predict benign
    bool right_label;
};

std::optional<OracleStump> oracle_best_stump(const std::vector<FeatureVector>& samples) {
    const std::size_t arity = samples.front().values.size();
    std::uint64_t parent0 = 0, parent1 = 0;
    for (const auto& s : samples) (s.label ? parent1 : parent0)++;
    const double parent_gini = oracle_gini(parent0, parent1);
    const double total = static_cast<double>(samples.size());

    std::optional<OracleStump> best;
    double best_gain = 0.0;
    for (std::size_t f = 0; f < arity; ++f) {
        std::vector<double> values;
        for (const auto& s : samples) values.push_back(s.values[f]);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());

        for (std::size_t k = 0; k + 1 < values.size(); ++k) {
            const double threshold = (values[k] + values[k + 1]) / 2.0;
            std::uint64_t l0 = 0, l1 = 0, r0 = 0, r1 = 0;
            for (const auto& s : samples) {
                if (s.values[f] <= threshold) {
                    (s.label ? l1 : l0)++;
                } else {
                    (s.label ? r1 : r0)++;
                }
            }
            const double ln = static_cast<double>(l0 + l1);
            const double rn = static_cast<double>(r0 + r1);
            const double weighted = (ln * oracle_gini(l0, l1) + rn * oracle_gini(r0, r1)) / total;
            const double gain = parent_gini - weighted;
            if (gain > best_gain) {
                best_gain = gain;
                best = OracleStump{f, threshold, gain, l1 > l0, r1 > r0};
            }
        }
    }
    return best;
}

std::vector<FeatureVector> random_dataset(SplitMix64& rng, std::size_t n, std::size_t arity) {
    std::vector<FeatureVector> data(n);
    for (auto& s : data) {
        s.values.resize(arity);
        // integer-valued features keep midpoints exact
        s.values[0] = static_cast<double>(rng.next_below(1000000));
        for (std::size_t f = 1; f < arity; ++f) {
            s.values[f] = static_cast<double>(rng.next_below(256));
        }
        s.label = rng.bernoulli(0.4);
    }
    return data;
}

std::vector<std::size_t> all_features(std::size_t arity) {
    std::vector<std::size_t> f(arity);
    for (std::size_t i = 0; i < arity; ++i) f[i] = i;
    return f;
}

FeatureVector sample1d(double value, bool label) {
    return FeatureVector{{value}, label};
}

}  // namespace

TEST_CASE("gini impurity fixtures") {
    CHECK(gini_impurity(6, 0) == 0.0);
    CHECK(gini_impurity(0, 6) == 0.0);
    CHECK(gini_impurity(3, 3) == 0.5);
    CHECK(gini_impurity(2, 4) == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
    CHECK_THROWS_AS(gini_impurity(0, 0), std::invalid_argument);
}

TEST_CASE("best_split on a two-point set") {
    const std::vector<FeatureVector> samples{sample1d(1.0, false), sample1d(10.0, true)};
    const auto split = best_split(samples, all_features(1));
    REQUIRE(split.has_value());
    CHECK(split->feature == 0);
    CHECK(split->threshold == 5.5);
    CHECK(split->gain == 0.5);
}

TEST_CASE("best_split finds nothing on degenerate sets") {
    // pure labels: zero gain everywhere
    const std::vector<FeatureVector> pure{sample1d(1.0, true), sample1d(2.0, true),
                                          sample1d(3.0, true)};
    CHECK_FALSE(best_split(pure, all_features(1)).has_value());

    // identical values, different labels: no midpoint exists
    const std::vector<FeatureVector> twin{sample1d(4.0, false), sample1d(4.0, true)};
    CHECK_FALSE(best_split(twin, all_features(1)).has_value());
}

TEST_CASE("best_split matches the oracle on random data") {
    SplitMix64 rng(0x5EED);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.next_below(120);
        const std::size_t arity = 1 + rng.next_below(17);
        const auto data = random_dataset(rng, n, arity);

        const auto fast = best_split(data, all_features(arity));
        const auto slow = oracle_best_stump(data);
        REQUIRE(fast.has_value() == slow.has_value());
        if (fast) {
            CHECK(fast->feature == slow->feature);
            CHECK(fast->threshold == slow->threshold);
            CHECK(fast->gain == slow->gain);
        }
    }
}

TEST_CASE("stratified split arithmetic") {
    std::vector<FeatureVector> data;
    for (int i = 0; i < 80; ++i) data.push_back(sample1d(i, false));
    for (int i = 0; i < 20; ++i) data.push_back(sample1d(100 + i, true));

    const auto split = split_train_test(data, 0.3, 42);
    CHECK(split.stratified);
    CHECK(split.train_indices.size() == 70);
    CHECK(split.test_indices.size() == 30);

    std::size_t positives_in_test = 0;
    for (auto i : split.test_indices) {
        if (data[i].label) ++positives_in_test;
    }
    CHECK(positives_in_test == 6);  // 20 * 0.3
}

TEST_CASE("split is a deterministic partition") {
    SplitMix64 rng(0xBEEF);
    auto data = random_dataset(rng, 137, 3);
    const auto a = split_train_test(data, 0.25, 9);
    const auto b = split_train_test(data, 0.25, 9);
    CHECK(a.train_indices == b.train_indices);
    CHECK(a.test_indices == b.test_indices);

    std::set<std::size_t> seen;
    for (auto i : a.train_indices) CHECK(seen.insert(i).second);
    for (auto i : a.test_indices) CHECK(seen.insert(i).second);
    CHECK(seen.size() == data.size());
    CHECK(*seen.rbegin() == data.size() - 1);

    const auto c = split_train_test(data, 0.25, 10);
    CHECK(a.test_indices != c.test_indices);  // seed actually matters
}

TEST_CASE("split falls back to unstratified with a lone positive") {
    std::vector<FeatureVector> data;
    for (int i = 0; i < 50; ++i) data.push_back(sample1d(i, false));
    data.push_back(sample1d(999, true));

    const auto split = split_train_test(data, 0.3, 7);
    CHECK_FALSE(split.stratified);
    CHECK(split.train_indices.size() + split.test_indices.size() == data.size());

    CHECK_THROWS_AS(split_train_test({}, 0.3, 7), std::invalid_argument);
    CHECK_THROWS_AS(split_train_test(data, 0.0, 7), std::invalid_argument);
    CHECK_THROWS_AS(split_train_test(data, 1.0, 7), std::invalid_argument);
}

TEST_CASE("feature extraction per mode") {
    EncryptionRecord record;
    record.duration_ns = 100000;
    record.anomaly = Anomaly::none();
    record.plaintext = block_from_hex("54000000000000000000000000000001");
    record.ciphertext = block_from_hex("ff000000000000000000000000000002");

    const auto time_only = extract_features(record, FeatureMode::TimeOnly);
    CHECK(time_only.values == std::vector<double>{100000.0});
    CHECK_FALSE(time_only.label);

    record.anomaly = Anomaly::fault();
    const auto with_plain = extract_features(record, FeatureMode::TimePlusPlaintext);
    REQUIRE(with_plain.values.size() == 17);
    CHECK(with_plain.values[0] == 100000.0);
    CHECK(with_plain.values[1] == 84.0);  // 0x54
    CHECK(with_plain.values[16] == 1.0);
    CHECK(with_plain.label);

    const auto with_cipher = extract_features(record, FeatureMode::TimePlusCiphertext);
    REQUIRE(with_cipher.values.size() == 17);
    CHECK(with_cipher.values[0] == with_plain.values[0]);
    CHECK(with_cipher.values[1] == 255.0);
    CHECK(with_cipher.values[16] == 2.0);

    CHECK(feature_arity(FeatureMode::TimeOnly) == 1);
    CHECK(feature_arity(FeatureMode::TimePlusPlaintext) == 17);
    CHECK(feature_arity(FeatureMode::TimePlusCiphertext) == 17);
}

TEST_CASE("depth-1 single tree equals the oracle stump") {
    SplitMix64 rng(0xACE);
    ForestHyperparams params;
    params.tree_count = 1;
    params.max_depth = 1;
    params.bootstrap = false;
    params.features_per_split = 17;  // all features are candidates

    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.next_below(200);
        const auto data = random_dataset(rng, n, 17);
        const auto model = train_forest(data, params, FeatureMode::TimePlusPlaintext, trial);
        const auto stump = oracle_best_stump(data);

        const auto& tree = model.trees[0];
        const auto& root = tree.nodes[0];
        if (!stump) {
            CHECK(root.is_leaf());
            continue;
        }
        REQUIRE_FALSE(root.is_leaf());
        CHECK(static_cast<std::size_t>(root.feature) == stump->feature);
        CHECK(root.threshold == stump->threshold);
        CHECK(tree.nodes[static_cast<std::size_t>(root.left)].label == stump->left_label);
        CHECK(tree.nodes[static_cast<std::size_t>(root.right)].label == stump->right_label);
    }
}

namespace {

std::uint32_t tree_depth(const DecisionTree& tree, std::size_t at = 0) {
    const auto& node = tree.nodes[at];
    if (node.is_leaf()) return 0;
    return 1 + std::max(tree_depth(tree, static_cast<std::size_t>(node.left)),
                        tree_depth(tree, static_cast<std::size_t>(node.right)));
}

}  // namespace

TEST_CASE("training is deterministic and parallel-invariant") {
    SplitMix64 rng(0xF00D);
    const auto data = random_dataset(rng, 300, 17);
    ForestHyperparams params;
    params.tree_count = 11;
    params.max_depth = 8;

    const auto a = train_forest(data, params, FeatureMode::TimePlusPlaintext, 5, 1);
    const auto b = train_forest(data, params, FeatureMode::TimePlusPlaintext, 5, 1);
    const auto c = train_forest(data, params, FeatureMode::TimePlusPlaintext, 5, 4);
    CHECK(a.trees == b.trees);
    CHECK(a.trees == c.trees);

    const auto d = train_forest(data, params, FeatureMode::TimePlusPlaintext, 6, 1);
    CHECK(a.trees != d.trees);

    for (const auto& tree : a.trees) {
        CHECK(tree_depth(tree) <= params.max_depth);
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf()) CHECK(node.feature < 17);
        }
    }
}

TEST_CASE("single-class training yields single-leaf trees") {
    std::vector<FeatureVector> data;
    for (int i = 0; i < 40; ++i) data.push_back(sample1d(i, true));

    ForestHyperparams params;
    params.tree_count = 5;
    const auto model = train_forest(data, params, FeatureMode::TimeOnly, 1);
    for (const auto& tree : model.trees) {
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].is_leaf());
        CHECK(tree.nodes[0].label);
    }
    CHECK(model.predict(std::vector<double>{123.0}));
}

TEST_CASE("full tree fits consistent training data perfectly") {
    SplitMix64 rng(0xCAFE);
    ForestHyperparams params;
    params.tree_count = 1;
    params.max_depth = 64;
    params.bootstrap = false;
    params.features_per_split = 4;

    for (int trial = 0; trial < 10; ++trial) {
        auto data = random_dataset(rng, 150, 4);
        // force label consistency for duplicate feature rows
        std::map<std::vector<double>, bool> canon;
        for (auto& s : data) {
            auto [it, inserted] = canon.try_emplace(s.values, s.label);
            s.label = it->second;
        }
        const auto model = train_forest(data, params, FeatureMode::TimeOnly, trial);
        for (const auto& s : data) {
            CHECK(model.predict(s.values) == s.label);
        }
    }
}

TEST_CASE("separable durations give perfect TimeOnly accuracy") {
    std::vector<FeatureVector> data;
    SplitMix64 rng(0xD1CE);
    for (int i = 0; i < 400; ++i) {
        const bool anomalous = i % 4 == 0;
        const double duration =
            anomalous ? 5000000.0 + rng.next_below(1000000) : 100000.0 + rng.next_below(10000);
        data.push_back(sample1d(duration, anomalous));
    }
    const auto split = split_train_test(data, 0.3, 3);
    ForestHyperparams params;
    params.tree_count = 11;
    const auto model =
        train_forest(subset(data, split.train_indices), params, FeatureMode::TimeOnly, 3);
    for (auto i : split.test_indices) {
        CHECK(model.predict(data[i].values) == data[i].label);
    }
}

TEST_CASE("votes are symmetric under tree permutation") {
    SplitMix64 rng(0x0DD);
    const auto data = random_dataset(rng, 200, 5);
    ForestHyperparams params;
    params.tree_count = 9;
    params.max_depth = 6;
    auto model = train_forest(data, params, FeatureMode::TimeOnly, 11);

    auto shuffled = model;
    std::reverse(shuffled.trees.begin(), shuffled.trees.end());
    for (int i = 0; i < 50; ++i) {
        const auto probe = random_dataset(rng, 1, 5)[0];
        CHECK(model.predict(probe.values) == shuffled.predict(probe.values));
    }
}

TEST_CASE("validation errors") {
    std::vector<FeatureVector> data{sample1d(1.0, false), sample1d(2.0, true)};
    ForestHyperparams params;

    params.tree_count = 10;  // even
    CHECK_THROWS_AS(train_forest(data, params, FeatureMode::TimeOnly, 1), std::invalid_argument);

    params.tree_count = 11;
    CHECK_THROWS_AS(train_forest({}, params, FeatureMode::TimeOnly, 1), std::invalid_argument);

    const auto model = train_forest(data, params, FeatureMode::TimeOnly, 1);
    CHECK_THROWS_AS(model.predict(std::vector<double>{1.0, 2.0}), std::invalid_argument);

    std::vector<FeatureVector> ragged{sample1d(1.0, false),
                                      FeatureVector{{1.0, 2.0}, true}};
    CHECK_THROWS_AS(train_forest(ragged, params, FeatureMode::TimeOnly, 1),
                    std::invalid_argument);
}

TEST_CASE("model serialization round trip") {
    SplitMix64 rng(0xBEAD);
    const auto data = random_dataset(rng, 250, 17);
    ForestHyperparams params;
    params.tree_count = 7;
    params.max_depth = 10;
    const auto model = train_forest(data, params, FeatureMode::TimePlusCiphertext, 99);

    const auto dir = std::filesystem::temp_directory_path() / "aeslab_forest_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "model.json";
    save_model(model, path);
    const auto loaded = load_model(path);

    CHECK(loaded.trees == model.trees);
    CHECK(loaded.hyperparams == model.hyperparams);
    CHECK(loaded.feature_mode == model.feature_mode);
    CHECK(loaded.arity == model.arity);
    CHECK(loaded.training_seed == model.training_seed);

    // identical bytes when re-saved
    const auto path2 = dir / "model2.json";
    save_model(loaded, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(s1 == s2);

    CHECK_THROWS_AS(load_model(dir / "missing.json"), std::runtime_error);
    std::filesystem::remove_all(dir);
}
