#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "aeslab/experiment.hpp"
#include "aeslab/report.hpp"

using namespace aeslab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "aeslab_report_test") {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

RunOptions small_run_options() {
    RunOptions options;
    options.experiment.injection.block_count = 200;
    options.experiment.injection.anomaly_ratio = 0.3;
    options.experiment.injection.master_seed = 17;
    options.experiment.worker_count = 2;
    options.experiment.feature_mode = FeatureMode::TimePlusCiphertext;
    options.forest.tree_count = 11;
    options.forest.max_depth = 8;
    return options;
}

}  // namespace

TEST_CASE("empty record set writes only the header") {
    TempDir dir;
    const auto path = dir.path / "empty.csv";
    write_csv({}, path);
    CHECK(slurp(path) == std::string(kCsvHeader) + "\n");
    CHECK(read_csv(path).empty());
}

TEST_CASE("fault rows have empty delay and the exact schema") {
    TempDir dir;
    EncryptionRecord r;
    r.index = 3;
    r.plaintext = block_from_hex("ab000000000000000000000000000000");
    r.ciphertext = block_from_hex("00000000000000000000000000000000");
    r.anomaly = Anomaly::fault();
    r.duration_ns = 123456;

    const auto path = dir.path / "one.csv";
    write_csv(std::vector<EncryptionRecord>{r}, path);
    const auto text = slurp(path);
    CHECK(text == std::string(kCsvHeader) +
                      "\n3,fault,,ab000000000000000000000000000000,"
                      "00000000000000000000000000000000,123456,,,all\n");
}

TEST_CASE("delay rows carry three decimals") {
    TempDir dir;
    EncryptionRecord r;
    r.index = 0;
    r.anomaly = Anomaly::delay(7.125);
    r.duration_ns = 7225000;
    r.flagged_threshold = true;
    r.flagged_ml = false;
    r.split = SplitTag::Test;

    const auto path = dir.path / "delay.csv";
    write_csv(std::vector<EncryptionRecord>{r}, path);
    const auto rows = read_csv(path);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].anomaly.type == AnomalyType::Delay);
    CHECK(rows[0].anomaly.delay_ms == 7.125);
    CHECK(rows[0].flagged_threshold == true);
    CHECK(rows[0].flagged_ml == false);
    CHECK(rows[0].split == SplitTag::Test);

    const auto text = slurp(path);
    CHECK(text.find(",7.125,") != std::string::npos);
}

TEST_CASE("CSV round trip preserves a full run") {
    TempDir dir;
    const auto result = execute_run(small_run_options());
    const auto path = dir.path / "run.csv";
    write_csv(result.records, path);
    const auto parsed = read_csv(path);

    REQUIRE(parsed.size() == result.records.size());
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        const auto& a = result.records[i];
        const auto& b = parsed[i];
        CHECK(a.index == b.index);
        CHECK(a.duration_ns == b.duration_ns);
        CHECK(a.flagged_threshold == b.flagged_threshold);
        CHECK(a.flagged_ml == b.flagged_ml);
        CHECK(a.split == b.split);
        CHECK(a.plaintext == b.plaintext);
        CHECK(a.ciphertext == b.ciphertext);
        CHECK(a.anomaly.type == b.anomaly.type);
    }
}

TEST_CASE("CSV writer surfaces the failing path") {
    const fs::path bogus = "/nonexistent_dir_aeslab/records.csv";
    CHECK_THROWS_WITH_AS(write_csv({}, bogus),
                         doctest::Contains("/nonexistent_dir_aeslab/records.csv"),
                         std::runtime_error);
    CHECK_THROWS_AS(read_csv(bogus), std::runtime_error);
}

TEST_CASE("manifest round trip is exact") {
    TempDir dir;
    const auto result = execute_run(small_run_options());
    const auto path = dir.path / "manifest.json";
    write_manifest(result.manifest, path);
    const auto loaded = read_manifest(path);
    CHECK(loaded == result.manifest);
}

TEST_CASE("manifest threshold is consistent with the CSV durations") {
    TempDir dir;
    const auto result = execute_run(small_run_options());
    const auto csv_path = dir.path / "records.csv";
    write_csv(result.records, csv_path);

    const auto rows = read_csv(csv_path);
    const auto recomputed = compute_threshold(durations_of(rows));
    CHECK(recomputed.threshold_ns == result.manifest.timing.threshold_ns);
    CHECK(recomputed.mean_ns == result.manifest.timing.mean_ns);
    CHECK(recomputed.count == result.manifest.timing.count);
}

TEST_CASE("dataset counts add up") {
    const auto result = execute_run(small_run_options());
    const auto counts = count_dataset(result.records);
    CHECK(counts.blocks == 200);
    CHECK(counts.benign + counts.delay + counts.fault == counts.blocks);
    CHECK(counts == result.dataset);

    // confusion population identities against dataset counts, test split only
    REQUIRE(result.manifest.ml_report.has_value());
    const auto& ml = *result.manifest.ml_report;
    std::uint64_t test_anomalous = 0, test_benign = 0;
    for (const auto& r : result.records) {
        if (r.split != SplitTag::Test) continue;
        (r.anomaly.is_anomalous() ? test_anomalous : test_benign)++;
    }
    CHECK(ml.counts.tp + ml.counts.fn == test_anomalous);
    CHECK(ml.counts.fp + ml.counts.tn == test_benign);
}

TEST_CASE("manifest replay reproduces the run") {
    const auto options = small_run_options();
    const auto first = execute_run(options);
    const auto replayed = execute_run(options_from_manifest(first.manifest));
    CHECK(first.records == replayed.records);

    auto a = manifest_to_json(first.manifest);
    auto b = manifest_to_json(replayed.manifest);
    a.erase("timestamps");
    b.erase("timestamps");
    CHECK(a == b);
}

TEST_CASE("single-class runs refuse to train a forest") {
    auto options = small_run_options();
    options.experiment.injection.anomaly_ratio = 0.0;
    CHECK_THROWS_WITH_AS(execute_run(options), doctest::Contains("single-class"),
                         std::runtime_error);

    options.detector = DetectorChoice::Threshold;  // threshold-only is fine
    const auto result = execute_run(options);
    CHECK(result.manifest.threshold_report.has_value());
    CHECK_FALSE(result.manifest.ml_report.has_value());
    CHECK_FALSE(result.model.has_value());
}
