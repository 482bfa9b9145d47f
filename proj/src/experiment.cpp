#include "aeslab/experiment.hpp"

#include <stdexcept>

#include "aeslab/version.hpp"

namespace aeslab {

void RunOptions::validate() const {
    experiment.validate();
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw std::invalid_argument("test_fraction must be in (0, 1)");
    }
    forest.validate();
}

RunResult execute_run(const RunOptions& options) {
    options.validate();

    RunResult result;
    result.manifest.tool_version = kVersion;
    result.manifest.config = options.experiment;
    result.manifest.detector = options.detector;
    result.manifest.test_fraction = options.test_fraction;
    result.manifest.forest = options.forest;
    result.manifest.started_at = utc_timestamp();

    const std::uint64_t master_seed = options.experiment.injection.master_seed;
    result.manifest.experiment_key_hex = to_hex(derive_experiment_key(master_seed).bytes);

    result.records = run_experiment(options.experiment);
    result.dataset = count_dataset(result.records);
    result.manifest.dataset = result.dataset;

    result.timing = compute_threshold(durations_of(result.records));
    result.manifest.timing = result.timing;

    const bool run_threshold = options.detector != DetectorChoice::Forest;
    const bool run_forest = options.detector != DetectorChoice::Threshold;

    if (run_threshold) {
        apply_threshold(result.records, result.timing);
        DetectorReport report;
        report.population = "all";
        report.counts = confusion(result.records, VerdictKind::Threshold);
        report.evaluated = report.counts.total();
        report.metrics = metrics_from(report.counts);
        result.manifest.threshold_report = report;
    }

    if (run_forest) {
        if (result.dataset.anomalous() == 0 || result.dataset.benign == 0) {
            throw std::runtime_error(
                "single-class training set: the run produced no " +
                std::string(result.dataset.anomalous() == 0 ? "anomalous" : "benign") +
                " blocks, so no forest can be trained");
        }
        const auto features = extract_dataset(result.records, options.experiment.feature_mode);
        auto split = split_train_test(features, options.test_fraction, master_seed);
        for (std::size_t i : split.train_indices) result.records[i].split = SplitTag::Train;
        for (std::size_t i : split.test_indices) result.records[i].split = SplitTag::Test;
        result.manifest.split = SplitSummary{split.train_indices.size(),
                                             split.test_indices.size(), split.stratified};

        const auto train = subset(features, split.train_indices);
        result.model = train_forest(train, options.forest, options.experiment.feature_mode,
                                    master_seed, options.experiment.worker_count);
        for (std::size_t i : split.test_indices) {
            result.records[i].flagged_ml = result.model->predict(features[i].values);
        }
        result.split = std::move(split);

        DetectorReport report;
        report.population = "test";
        report.counts = confusion(result.records, VerdictKind::Ml);
        report.evaluated = report.counts.total();
        report.metrics = metrics_from(report.counts);
        result.manifest.ml_report = report;
    }

    result.manifest.finished_at = utc_timestamp();
    return result;
}

RunOptions options_from_manifest(const RunManifest& manifest) {
    RunOptions options;
    options.experiment = manifest.config;
    options.detector = manifest.detector;
    options.test_fraction = manifest.test_fraction;
    options.forest = manifest.forest;
    return options;
}

}  // namespace aeslab
