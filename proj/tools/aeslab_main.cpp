// aeslab command line front end: run / train / evaluate / selftest.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error. Outputs land only
// in the user-specified locations, and a failing command removes whatever it
// had already written.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "aeslab/experiment.hpp"
#include "aeslab/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Tracks files created by the current command so a failure can undo them.
class OutputStager {
public:
    void record(const fs::path& path) { written_.push_back(path); }

    void discard_all() {
        std::error_code ec;
        for (const auto& path : written_) fs::remove(path, ec);
        written_.clear();
    }

private:
    std::vector<fs::path> written_;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t random_master_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string format_metric(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *v);
    return buf;
}

void print_detector_line(const char* name, const aeslab::DetectorReport& report) {
    std::printf("  %-10s accuracy %s  precision %s  recall %s  f1 %s   [%s %llu]\n", name,
                format_metric(report.metrics.accuracy).c_str(),
                format_metric(report.metrics.precision).c_str(),
                format_metric(report.metrics.recall).c_str(),
                format_metric(report.metrics.f1).c_str(), report.population.c_str(),
                static_cast<unsigned long long>(report.evaluated));
}

ordered_json scored_subset_to_json(const aeslab::ConfusionCounts& counts) {
    const auto metrics = aeslab::metrics_from(counts);
    auto field = [](const std::optional<double>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    return {{"confusion",
             {{"tp", counts.tp}, {"fp", counts.fp}, {"fn", counts.fn}, {"tn", counts.tn}}},
            {"metrics",
             {{"accuracy", field(metrics.accuracy)},
              {"precision", field(metrics.precision)},
              {"recall", field(metrics.recall)},
              {"f1", field(metrics.f1)}}}};
}

void write_json_file(const ordered_json& j, const fs::path& path, OutputStager& stager) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path.string());
    }
    stager.record(path);
    out << j.dump(2) << '\n';
    if (!out.flush()) {
        throw std::runtime_error("failed writing: " + path.string());
    }
}

// Shared flag bag; each subcommand registers the subset it understands.
struct Flags {
    std::uint64_t blocks = 1000;
    double ratio = 0.2;
    unsigned workers = 4;
    std::optional<std::uint64_t> seed;
    std::string timing = "simulated";
    std::string plaintext = "random";
    std::string detector = "both";
    std::string features = "time+cipher";
    double test_fraction = 0.3;
    std::uint32_t trees = 101;
    std::uint32_t max_depth = 16;
    std::uint32_t min_samples_split = 2;
    std::uint32_t features_per_split = 0;
    double delay_min_ms = 5.0;
    double delay_max_ms = 20.0;
    double sim_baseline_ms = 0.1;
    double sim_jitter_ms = 0.01;
    std::string out_dir;
    std::string model_path;
    std::string csv_path;
    std::string replay_path;
    std::string eval_split = "auto";
    std::string eval_features;  // empty = use the model's recorded mode
    bool corrupt_sbox = false;
};

void add_generation_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--blocks", f.blocks, "Number of 16-byte blocks to generate")
        ->default_val(f.blocks);
    cmd->add_option("--ratio", f.ratio, "Probability that a block receives an anomaly")
        ->default_val(f.ratio);
    cmd->add_option("--workers", f.workers, "Worker threads for encryption and training")
        ->default_val(f.workers);
    cmd->add_option("--seed", f.seed,
                    "Master seed; every random draw derives from it. Drawn at random "
                    "(and printed) when omitted");
    cmd->add_option("--timing", f.timing, "Clock mode")
        ->check(CLI::IsMember({"real", "simulated"}))
        ->default_val(f.timing);
    cmd->add_option("--plaintext", f.plaintext, "Plaintext byte source")
        ->check(CLI::IsMember({"random", "ascii"}))
        ->default_val(f.plaintext);
    cmd->add_option("--delay-min-ms", f.delay_min_ms, "Lower bound of injected delays")
        ->default_val(f.delay_min_ms);
    cmd->add_option("--delay-max-ms", f.delay_max_ms, "Upper bound of injected delays")
        ->default_val(f.delay_max_ms);
    cmd->add_option("--sim-baseline-ms", f.sim_baseline_ms,
                    "Simulated clock: mean baseline encryption time")
        ->default_val(f.sim_baseline_ms);
    cmd->add_option("--sim-jitter-ms", f.sim_jitter_ms,
                    "Simulated clock: baseline standard deviation")
        ->default_val(f.sim_jitter_ms);
}

void add_forest_flags(CLI::App* cmd, Flags& f) {
    cmd->add_option("--features", f.features, "Feature set for the forest")
        ->check(CLI::IsMember({"time", "time+plain", "time+cipher"}))
        ->default_val(f.features);
    cmd->add_option("--test-fraction", f.test_fraction, "Fraction of records held out for testing")
        ->default_val(f.test_fraction);
    cmd->add_option("--trees", f.trees, "Number of trees (must be odd)")->default_val(f.trees);
    cmd->add_option("--max-depth", f.max_depth, "Maximum tree depth")->default_val(f.max_depth);
    cmd->add_option("--min-samples-split", f.min_samples_split,
                    "Smallest node the trainer will try to split")
        ->default_val(f.min_samples_split);
    cmd->add_option("--features-per-split", f.features_per_split,
                    "Candidate features per node; 0 = floor(sqrt(arity))")
        ->default_val(f.features_per_split);
}

void validate_common(const Flags& f, bool need_blocks) {
    if (need_blocks && f.blocks < 1) throw UsageError("blocks must be >= 1");
    if (f.ratio < 0.0 || f.ratio > 1.0) throw UsageError("ratio must be in [0, 1]");
    if (f.workers < 1) throw UsageError("workers must be >= 1");
    if (!(f.delay_min_ms > 0.0)) throw UsageError("delay-min-ms must be > 0");
    if (f.delay_min_ms > f.delay_max_ms) throw UsageError("delay-min-ms must be <= delay-max-ms");
    if (!(f.sim_baseline_ms > 0.0)) throw UsageError("sim-baseline-ms must be > 0");
    if (f.sim_jitter_ms < 0.0) throw UsageError("sim-jitter-ms must be >= 0");
    if (!(f.test_fraction > 0.0 && f.test_fraction < 1.0)) {
        throw UsageError("test-fraction must be in (0, 1)");
    }
    if (f.trees == 0 || f.trees % 2 == 0) throw UsageError("trees must be odd and >= 1");
    if (f.max_depth == 0) throw UsageError("max-depth must be >= 1");
    if (f.min_samples_split < 2) throw UsageError("min-samples-split must be >= 2");
}

aeslab::RunOptions options_from_flags(const Flags& f, std::uint64_t master_seed) {
    aeslab::RunOptions options;
    options.experiment.injection.block_count = f.blocks;
    options.experiment.injection.anomaly_ratio = f.ratio;
    options.experiment.injection.delay_min_ms = f.delay_min_ms;
    options.experiment.injection.delay_max_ms = f.delay_max_ms;
    options.experiment.injection.plaintext_source =
        aeslab::plaintext_source_from_string(f.plaintext);
    options.experiment.injection.master_seed = master_seed;
    options.experiment.worker_count = f.workers;
    options.experiment.timing.mode = aeslab::clock_mode_from_string(f.timing);
    options.experiment.timing.baseline_mean_ms = f.sim_baseline_ms;
    options.experiment.timing.baseline_jitter_ms = f.sim_jitter_ms;
    options.experiment.feature_mode = aeslab::feature_mode_from_string(f.features);
    options.detector = aeslab::detector_choice_from_string(f.detector);
    options.test_fraction = f.test_fraction;
    options.forest.tree_count = f.trees;
    options.forest.max_depth = f.max_depth;
    options.forest.min_samples_split = f.min_samples_split;
    options.forest.features_per_split = f.features_per_split;
    return options;
}

std::uint64_t resolve_seed(const Flags& f) {
    if (f.seed) return *f.seed;
    const std::uint64_t seed = random_master_seed();
    std::printf("seed: %llu (randomly drawn; pass --seed %llu to reproduce)\n",
                static_cast<unsigned long long>(seed), static_cast<unsigned long long>(seed));
    return seed;
}

fs::path prepare_out_dir(const std::string& out_dir) {
    if (out_dir.empty()) throw UsageError("--out is required");
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " +
                                 ec.message());
    }
    return dir;
}

int cmd_run(const Flags& f) {
    aeslab::RunOptions options;
    if (!f.replay_path.empty()) {
        options = aeslab::options_from_manifest(aeslab::read_manifest(f.replay_path));
        std::printf("replaying %s (seed %llu)\n", f.replay_path.c_str(),
                    static_cast<unsigned long long>(options.experiment.injection.master_seed));
    } else {
        validate_common(f, true);
        options = options_from_flags(f, resolve_seed(f));
    }
    const fs::path out_dir = prepare_out_dir(f.out_dir);
    const fs::path csv_path = out_dir / "records.csv";
    const fs::path manifest_path = out_dir / "manifest.json";
    const fs::path model_path = f.model_path.empty() ? out_dir / "model.json"
                                                     : fs::path(f.model_path);

    OutputStager stager;
    try {
        auto result = aeslab::execute_run(options);

        stager.record(csv_path);
        aeslab::write_csv(result.records, csv_path);
        std::vector<std::string> outputs{csv_path.string()};
        if (result.model) {
            stager.record(model_path);
            aeslab::save_model(*result.model, model_path);
            outputs.push_back(model_path.string());
        }
        stager.record(manifest_path);
        aeslab::write_manifest(result.manifest, manifest_path);
        outputs.push_back(manifest_path.string());

        std::printf("aeslab run\n");
        std::printf("  blocks %llu  ratio %.3f  seed %llu  timing %s  workers %u  plaintext %s\n",
                    static_cast<unsigned long long>(options.experiment.injection.block_count),
                    options.experiment.injection.anomaly_ratio,
                    static_cast<unsigned long long>(options.experiment.injection.master_seed),
                    std::string(to_string(options.experiment.timing.mode)).c_str(),
                    options.experiment.worker_count,
                    std::string(to_string(options.experiment.injection.plaintext_source)).c_str());
        std::printf("  dataset: %llu benign, %llu delay, %llu fault\n",
                    static_cast<unsigned long long>(result.dataset.benign),
                    static_cast<unsigned long long>(result.dataset.delay),
                    static_cast<unsigned long long>(result.dataset.fault));
        std::printf("  threshold T = %.1f ns  (mean %.1f, min %llu, max %llu, n %llu)\n",
                    result.timing.threshold_ns, result.timing.mean_ns,
                    static_cast<unsigned long long>(result.timing.min_ns),
                    static_cast<unsigned long long>(result.timing.max_ns),
                    static_cast<unsigned long long>(result.timing.count));
        if (result.manifest.threshold_report) {
            print_detector_line("threshold:", *result.manifest.threshold_report);
        }
        if (result.manifest.ml_report) {
            print_detector_line("forest:", *result.manifest.ml_report);
        }
        std::string joined;
        for (const auto& o : outputs) joined += (joined.empty() ? "" : ", ") + o;
        std::printf("  wrote %s\n", joined.c_str());
        return kExitOk;
    } catch (...) {
        stager.discard_all();
        throw;
    }
}

// Train/test metrics over explicit index sets; flagged_ml is only persisted
// for the test rows, mirroring what a run records.
struct TrainedArtifacts {
    aeslab::ForestModel model;
    aeslab::TrainTestSplit split;
    bool reused_csv_tags = false;
    aeslab::ConfusionCounts train_counts;
    aeslab::ConfusionCounts test_counts;
};

aeslab::ConfusionCounts score_subset(const aeslab::ForestModel& model,
                                     const std::vector<aeslab::FeatureVector>& features,
                                     std::span<const std::size_t> indices) {
    aeslab::ConfusionCounts counts;
    for (std::size_t i : indices) {
        const bool predicted = model.predict(features[i].values);
        const bool truth = features[i].label;
        if (truth && predicted) ++counts.tp;
        else if (!truth && predicted) ++counts.fp;
        else if (truth && !predicted) ++counts.fn;
        else ++counts.tn;
    }
    return counts;
}

TrainedArtifacts train_from_records(std::vector<aeslab::EncryptionRecord>& records,
                                    const Flags& f, std::uint64_t seed) {
    std::uint64_t anomalous = 0;
    for (const auto& r : records) {
        if (r.anomaly.is_anomalous()) ++anomalous;
    }
    if (anomalous == 0 || anomalous == records.size()) {
        throw std::runtime_error("single-class training set: need both benign and anomalous rows");
    }

    const auto mode = aeslab::feature_mode_from_string(f.features);
    const auto features = aeslab::extract_dataset(records, mode);

    TrainedArtifacts artifacts;
    bool have_tags = false;
    for (const auto& r : records) {
        if (r.split != aeslab::SplitTag::All) {
            have_tags = true;
            break;
        }
    }
    if (have_tags) {
        // Reuse the split recorded in the CSV so results line up with the run
        // that produced it.
        artifacts.reused_csv_tags = true;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (records[i].split == aeslab::SplitTag::Test) {
                artifacts.split.test_indices.push_back(i);
            } else {
                artifacts.split.train_indices.push_back(i);
            }
        }
    } else {
        artifacts.split = aeslab::split_train_test(features, f.test_fraction, seed);
        for (std::size_t i : artifacts.split.train_indices) {
            records[i].split = aeslab::SplitTag::Train;
        }
        for (std::size_t i : artifacts.split.test_indices) {
            records[i].split = aeslab::SplitTag::Test;
        }
    }
    if (artifacts.split.train_indices.empty()) {
        throw std::runtime_error("empty training split");
    }

    aeslab::ForestHyperparams params;
    params.tree_count = f.trees;
    params.max_depth = f.max_depth;
    params.min_samples_split = f.min_samples_split;
    params.features_per_split = f.features_per_split;

    const auto train = aeslab::subset(features, artifacts.split.train_indices);
    artifacts.model = aeslab::train_forest(train, params, mode, seed, f.workers);

    for (std::size_t i : artifacts.split.test_indices) {
        records[i].flagged_ml = artifacts.model.predict(features[i].values);
    }
    artifacts.train_counts = score_subset(artifacts.model, features, artifacts.split.train_indices);
    artifacts.test_counts = score_subset(artifacts.model, features, artifacts.split.test_indices);
    return artifacts;
}

int cmd_train(const Flags& f) {
    validate_common(f, f.csv_path.empty());
    const fs::path out_dir = prepare_out_dir(f.out_dir);
    const fs::path model_path =
        f.model_path.empty() ? out_dir / "model.json" : fs::path(f.model_path);
    const fs::path report_path = out_dir / "training_report.json";
    const fs::path tagged_csv_path = out_dir / "records_tagged.csv";

    OutputStager stager;
    try {
        const std::uint64_t seed = resolve_seed(f);
        std::vector<aeslab::EncryptionRecord> records;
        if (!f.csv_path.empty()) {
            records = aeslab::read_csv(f.csv_path);
            if (records.empty()) throw std::runtime_error("no rows in " + f.csv_path);
        } else {
            // Fresh config: run a whole experiment first, then train on it.
            auto options = options_from_flags(f, seed);
            options.detector = aeslab::DetectorChoice::Threshold;
            records = aeslab::run_experiment(options.experiment);
            const auto stats = aeslab::compute_threshold(aeslab::durations_of(records));
            aeslab::apply_threshold(records, stats);
        }

        auto artifacts = train_from_records(records, f, seed);

        stager.record(model_path);
        aeslab::save_model(artifacts.model, model_path);
        stager.record(tagged_csv_path);
        aeslab::write_csv(records, tagged_csv_path);

        ordered_json report;
        report["format"] = "aeslab-training-report";
        report["version"] = 1;
        report["tool_version"] = aeslab::kVersion;
        report["model_path"] = model_path.string();
        report["source_csv"] = f.csv_path;
        report["feature_mode"] = f.features;
        report["seed"] = seed;
        report["test_fraction"] = f.test_fraction;
        report["hyperparams"] = {{"tree_count", f.trees},
                                 {"max_depth", f.max_depth},
                                 {"min_samples_split", f.min_samples_split},
                                 {"features_per_split", f.features_per_split},
                                 {"bootstrap", true}};
        report["split"] = {{"train", artifacts.split.train_indices.size()},
                           {"test", artifacts.split.test_indices.size()},
                           {"source", artifacts.reused_csv_tags ? "csv-tags" : "seeded"},
                           {"stratified", artifacts.reused_csv_tags
                                              ? ordered_json(nullptr)
                                              : ordered_json(artifacts.split.stratified)}};
        report["train"] = scored_subset_to_json(artifacts.train_counts);
        report["test"] = scored_subset_to_json(artifacts.test_counts);
        write_json_file(report, report_path, stager);

        const auto test_metrics = aeslab::metrics_from(artifacts.test_counts);
        std::printf("aeslab train\n");
        std::printf("  %zu train / %zu test rows, features %s, seed %llu, %u trees\n",
                    artifacts.split.train_indices.size(), artifacts.split.test_indices.size(),
                    f.features.c_str(), static_cast<unsigned long long>(seed), f.trees);
        std::printf("  test: accuracy %s  precision %s  recall %s  f1 %s\n",
                    format_metric(test_metrics.accuracy).c_str(),
                    format_metric(test_metrics.precision).c_str(),
                    format_metric(test_metrics.recall).c_str(),
                    format_metric(test_metrics.f1).c_str());
        std::printf("  wrote %s, %s, %s\n", model_path.string().c_str(),
                    tagged_csv_path.string().c_str(), report_path.string().c_str());
        return kExitOk;
    } catch (...) {
        stager.discard_all();
        throw;
    }
}

int cmd_evaluate(const Flags& f) {
    if (f.csv_path.empty()) throw UsageError("--csv is required");
    if (f.model_path.empty()) throw UsageError("--model is required");
    const fs::path out_dir = prepare_out_dir(f.out_dir);
    const fs::path report_path = out_dir / "evaluation_report.json";
    const fs::path csv_out_path = out_dir / "records_evaluated.csv";

    OutputStager stager;
    try {
        auto records = aeslab::read_csv(f.csv_path);
        if (records.empty()) throw std::runtime_error("no rows in " + f.csv_path);
        const auto model = aeslab::load_model(f.model_path);

        // An explicit --features must agree with what the model was trained
        // on; otherwise the model's own mode applies.
        if (!f.eval_features.empty() &&
            aeslab::feature_mode_from_string(f.eval_features) != model.feature_mode) {
            throw std::runtime_error("feature mode mismatch: model was trained with " +
                                     std::string(to_string(model.feature_mode)) +
                                     ", requested " + f.eval_features);
        }
        if (model.arity != aeslab::feature_arity(model.feature_mode)) {
            throw std::runtime_error("feature arity mismatch: model declares " +
                                     std::to_string(model.arity) + " features but mode " +
                                     std::string(to_string(model.feature_mode)) + " yields " +
                                     std::to_string(aeslab::feature_arity(model.feature_mode)));
        }

        std::string target = f.eval_split;
        if (target == "auto") {
            target = "all";
            for (const auto& r : records) {
                if (r.split == aeslab::SplitTag::Test) {
                    target = "test";
                    break;
                }
            }
        }

        const auto features = aeslab::extract_dataset(records, model.feature_mode);
        aeslab::ConfusionCounts counts;
        std::uint64_t evaluated = 0;
        for (std::size_t i = 0; i < records.size(); ++i) {
            const bool in_target = target == "all" ||
                                   records[i].split == aeslab::split_tag_from_string(target);
            if (!in_target) continue;
            const bool predicted = model.predict(features[i].values);
            records[i].flagged_ml = predicted;
            ++evaluated;
            const bool truth = records[i].anomaly.is_anomalous();
            if (truth && predicted) ++counts.tp;
            else if (!truth && predicted) ++counts.fp;
            else if (truth && !predicted) ++counts.fn;
            else ++counts.tn;
        }
        if (evaluated == 0) {
            throw std::runtime_error("no rows in the requested split \"" + target + "\"");
        }

        stager.record(csv_out_path);
        aeslab::write_csv(records, csv_out_path);

        ordered_json report;
        report["format"] = "aeslab-evaluation-report";
        report["version"] = 1;
        report["tool_version"] = aeslab::kVersion;
        report["model_path"] = f.model_path;
        report["source_csv"] = f.csv_path;
        report["feature_mode"] = std::string(to_string(model.feature_mode));
        report["split"] = target;
        report["evaluated"] = evaluated;
        report.update(scored_subset_to_json(counts));
        write_json_file(report, report_path, stager);

        const auto metrics = aeslab::metrics_from(counts);
        std::printf("aeslab evaluate\n");
        std::printf("  %llu rows in split \"%s\", features %s\n",
                    static_cast<unsigned long long>(evaluated), target.c_str(),
                    std::string(to_string(model.feature_mode)).c_str());
        std::printf("  accuracy %s  precision %s  recall %s  f1 %s\n",
                    format_metric(metrics.accuracy).c_str(),
                    format_metric(metrics.precision).c_str(),
                    format_metric(metrics.recall).c_str(), format_metric(metrics.f1).c_str());
        std::printf("  wrote %s, %s\n", csv_out_path.string().c_str(),
                    report_path.string().c_str());
        return kExitOk;
    } catch (...) {
        stager.discard_all();
        throw;
    }
}

int cmd_selftest(const Flags& f) {
    std::vector<aeslab::SelftestResult> results;
    if (f.corrupt_sbox) {
        auto sbox_span = aeslab::aes_detail::canonical_sbox();
        std::array<std::uint8_t, 256> corrupted{};
        std::copy(sbox_span.begin(), sbox_span.end(), corrupted.begin());
        corrupted[0x00] ^= 0x01;  // entry 0 is always exercised by the zero vector
        results = aeslab::selftest(corrupted);
    } else {
        results = aeslab::selftest();
    }

    // Threshold-formula fixtures ride along with the cipher vectors.
    {
        const std::vector<std::uint64_t> degenerate{5000000, 5000000, 5000000, 5000000};
        const auto stats = aeslab::compute_threshold(degenerate);
        results.push_back({"threshold-degenerate-spread",
                           stats.threshold_ns == 5000000.0 && stats.mean_ns == 5000000.0});

        const std::vector<std::uint64_t> spread{1000000, 1000000, 1000000, 1000000, 10000000};
        const auto spread_stats = aeslab::compute_threshold(spread);
        bool one_flag = spread_stats.threshold_ns == 8200000.0;
        std::size_t flagged = 0;
        for (std::uint64_t d : spread) {
            if (static_cast<double>(d) > spread_stats.threshold_ns) ++flagged;
        }
        one_flag = one_flag && flagged == 1;
        results.push_back({"threshold-spread-fixture", one_flag});
    }

    bool all_passed = true;
    for (const auto& r : results) {
        std::printf("%s %s\n", r.passed ? "ok  " : "FAIL", r.name.c_str());
        all_passed = all_passed && r.passed;
    }
    std::printf("%zu vectors, %s\n", results.size(), all_passed ? "all passed" : "FAILURES");
    return all_passed ? kExitOk : kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AES-128 timing/fault anomaly-detection laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", aeslab::kVersion);

    Flags flags;

    auto* run = app.add_subcommand(
        "run", "Generate blocks, encrypt with timing, run detectors, write CSV + manifest");
    add_generation_flags(run, flags);
    add_forest_flags(run, flags);
    run->add_option("--detector", flags.detector, "Which detectors to run")
        ->check(CLI::IsMember({"threshold", "forest", "both"}))
        ->default_val(flags.detector);
    run->add_option("--out", flags.out_dir, "Output directory")->required();
    run->add_option("--model", flags.model_path,
                    "Where to write the inline-trained model (default <out>/model.json)");
    run->add_option("--replay", flags.replay_path,
                    "Re-run the exact configuration of an existing manifest");

    auto* train = app.add_subcommand("train",
                                     "Train a forest from a run CSV (or a fresh simulated run)");
    add_generation_flags(train, flags);
    add_forest_flags(train, flags);
    train->add_option("--csv", flags.csv_path, "Run CSV to train from");
    train->add_option("--out", flags.out_dir, "Output directory")->required();
    train->add_option("--model", flags.model_path,
                      "Model output path (default <out>/model.json)");

    auto* evaluate = app.add_subcommand("evaluate", "Apply a saved model to a run CSV");
    evaluate->add_option("--csv", flags.csv_path, "Run CSV to evaluate")->required();
    evaluate->add_option("--model", flags.model_path, "Model file to apply")->required();
    evaluate->add_option("--out", flags.out_dir, "Output directory")->required();
    evaluate->add_option("--split", flags.eval_split,
                         "Rows to evaluate: train, test, all, or auto (test when the CSV "
                         "carries a test split, otherwise all)")
        ->check(CLI::IsMember({"train", "test", "all", "auto"}))
        ->default_val(flags.eval_split);
    evaluate->add_option("--features", flags.eval_features,
                         "Must match the model's feature mode if given")
        ->check(CLI::IsMember({"time", "time+plain", "time+cipher"}));

    auto* selftest = app.add_subcommand("selftest", "Run cipher KATs and threshold fixtures");
    selftest->add_flag("--corrupt-sbox", flags.corrupt_sbox)->group("");  // test hook, hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help / --version
        }
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(flags);
        if (train->parsed()) return cmd_train(flags);
        if (evaluate->parsed()) return cmd_evaluate(flags);
        if (selftest->parsed()) return cmd_selftest(flags);
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
