#pragma once

#include <optional>
#include <vector>

#include "aeslab/forest.hpp"
#include "aeslab/harness.hpp"
#include "aeslab/report.hpp"

namespace aeslab {

struct RunOptions {
    ExperimentConfig experiment;
    DetectorChoice detector = DetectorChoice::Both;
    double test_fraction = 0.3;
    ForestHyperparams forest;

    void validate() const;
};

struct RunResult {
    std::vector<EncryptionRecord> records;  // flags and split tags filled in
    DatasetCounts dataset;
    TimingStats timing;
    std::optional<TrainTestSplit> split;
    std::optional<ForestModel> model;
    RunManifest manifest;
};

// The whole pipeline: generate, encrypt under the measured clock, run the
// selected detectors, assemble the manifest. Simulated-mode results are a
// pure function of the options. Split and training seeds both derive from
// the master seed through their own domains.
RunResult execute_run(const RunOptions& options);

RunOptions options_from_manifest(const RunManifest& manifest);

}  // namespace aeslab
