// Python bindings for the aeslab core. Byte blocks cross the boundary as
// Python bytes objects and are length-checked on the way in.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "aeslab/experiment.hpp"
#include "aeslab/version.hpp"

namespace py = pybind11;
using namespace aeslab;

namespace {

Block16 block_from_pybytes(const py::bytes& data) {
    const std::string raw = data;
    return to_block(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

py::bytes block_to_pybytes(const Block16& block) {
    return py::bytes(reinterpret_cast<const char*>(block.data()), block.size());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "AES-128 timing/fault anomaly-detection laboratory";
    m.attr("__version__") = kVersion;

    py::enum_<AnomalyType>(m, "AnomalyType")
        .value("NONE", AnomalyType::None)
        .value("DELAY", AnomalyType::Delay)
        .value("FAULT", AnomalyType::Fault);

    py::class_<Anomaly>(m, "Anomaly")
        .def_static("none", &Anomaly::none)
        .def_static("delay", &Anomaly::delay, py::arg("ms"))
        .def_static("fault", &Anomaly::fault)
        .def_readonly("type", &Anomaly::type)
        .def_readonly("delay_ms", &Anomaly::delay_ms)
        .def_property_readonly("is_anomalous", &Anomaly::is_anomalous)
        .def("__repr__", [](const Anomaly& a) {
            return "Anomaly(" + std::string(to_string(a.type)) + ")";
        });

    py::enum_<PlaintextSource>(m, "PlaintextSource")
        .value("UNIFORM_RANDOM", PlaintextSource::UniformRandom)
        .value("PRINTABLE_ASCII", PlaintextSource::PrintableAscii);

    py::class_<InjectionConfig>(m, "InjectionConfig")
        .def(py::init<>())
        .def_readwrite("block_count", &InjectionConfig::block_count)
        .def_readwrite("anomaly_ratio", &InjectionConfig::anomaly_ratio)
        .def_readwrite("delay_min_ms", &InjectionConfig::delay_min_ms)
        .def_readwrite("delay_max_ms", &InjectionConfig::delay_max_ms)
        .def_readwrite("plaintext_source", &InjectionConfig::plaintext_source)
        .def_readwrite("master_seed", &InjectionConfig::master_seed)
        .def("validate", &InjectionConfig::validate);

    py::class_<LabeledBlock>(m, "LabeledBlock")
        .def_readonly("index", &LabeledBlock::index)
        .def_property_readonly("plaintext",
                               [](const LabeledBlock& b) { return block_to_pybytes(b.plaintext); })
        .def_property_readonly(
            "original_plaintext",
            [](const LabeledBlock& b) { return block_to_pybytes(b.original_plaintext); })
        .def_readonly("anomaly", &LabeledBlock::anomaly);

    m.def("generate_blocks", &generate_blocks, py::arg("config"));
    m.def("apply_fault",
          [](const py::bytes& block) { return block_to_pybytes(apply_fault(block_from_pybytes(block))); },
          py::arg("block"));
    m.def("pad_or_truncate", [](const py::bytes& data) {
        const std::string raw = data;
        return block_to_pybytes(pad_or_truncate(
            std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size())));
    });

    py::class_<KeySchedule>(m, "KeySchedule");
    py::class_<Aes128Key>(m, "Aes128Key")
        .def(py::init([](const py::bytes& key) { return Aes128Key{block_from_pybytes(key)}; }))
        .def_property_readonly("bytes",
                               [](const Aes128Key& k) { return block_to_pybytes(k.bytes); });
    m.def("expand_key", &expand_key, py::arg("key"));
    m.def("encrypt_block", [](const py::bytes& plain, const KeySchedule& schedule) {
        return block_to_pybytes(encrypt_block(block_from_pybytes(plain), schedule));
    });
    m.def("decrypt_block", [](const py::bytes& cipher, const KeySchedule& schedule) {
        return block_to_pybytes(decrypt_block(block_from_pybytes(cipher), schedule));
    });
    m.def("derive_experiment_key", &derive_experiment_key, py::arg("master_seed"));
    m.def("cipher_selftest", []() {
        std::vector<std::pair<std::string, bool>> out;
        for (const auto& r : selftest()) out.emplace_back(r.name, r.passed);
        return out;
    });

    py::enum_<ClockMode>(m, "ClockMode")
        .value("REAL", ClockMode::Real)
        .value("SIMULATED", ClockMode::Simulated);

    py::enum_<SplitTag>(m, "SplitTag")
        .value("ALL", SplitTag::All)
        .value("TRAIN", SplitTag::Train)
        .value("TEST", SplitTag::Test);

    py::enum_<FeatureMode>(m, "FeatureMode")
        .value("TIME_ONLY", FeatureMode::TimeOnly)
        .value("TIME_PLUS_PLAINTEXT", FeatureMode::TimePlusPlaintext)
        .value("TIME_PLUS_CIPHERTEXT", FeatureMode::TimePlusCiphertext);

    py::class_<TimingModelConfig>(m, "TimingModelConfig")
        .def(py::init<>())
        .def_readwrite("mode", &TimingModelConfig::mode)
        .def_readwrite("baseline_mean_ms", &TimingModelConfig::baseline_mean_ms)
        .def_readwrite("baseline_jitter_ms", &TimingModelConfig::baseline_jitter_ms);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("injection", &ExperimentConfig::injection)
        .def_readwrite("worker_count", &ExperimentConfig::worker_count)
        .def_readwrite("timing", &ExperimentConfig::timing)
        .def_readwrite("feature_mode", &ExperimentConfig::feature_mode)
        .def("validate", &ExperimentConfig::validate);

    py::class_<EncryptionRecord>(m, "EncryptionRecord")
        .def_readonly("index", &EncryptionRecord::index)
        .def_property_readonly(
            "plaintext",
            [](const EncryptionRecord& r) { return block_to_pybytes(r.plaintext); })
        .def_property_readonly(
            "ciphertext", [](const EncryptionRecord& r) { return block_to_pybytes(r.ciphertext); })
        .def_readonly("anomaly", &EncryptionRecord::anomaly)
        .def_readonly("duration_ns", &EncryptionRecord::duration_ns)
        .def_readonly("flagged_threshold", &EncryptionRecord::flagged_threshold)
        .def_readonly("flagged_ml", &EncryptionRecord::flagged_ml)
        .def_readonly("split", &EncryptionRecord::split);

    m.def("run_experiment", &run_experiment, py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<TimingStats>(m, "TimingStats")
        .def_readonly("mean_ns", &TimingStats::mean_ns)
        .def_readonly("min_ns", &TimingStats::min_ns)
        .def_readonly("max_ns", &TimingStats::max_ns)
        .def_readonly("count", &TimingStats::count)
        .def_readonly("threshold_ns", &TimingStats::threshold_ns);

    m.def("compute_threshold", [](const std::vector<std::uint64_t>& durations) {
        return compute_threshold(durations);
    });
    m.def("apply_threshold", [](std::vector<EncryptionRecord>& records, const TimingStats& stats) {
        apply_threshold(records, stats);
        return records;
    });

    py::class_<FeatureVector>(m, "FeatureVector")
        .def_readonly("values", &FeatureVector::values)
        .def_readonly("label", &FeatureVector::label);

    m.def("extract_features", &extract_features, py::arg("record"), py::arg("mode"));
    m.def("extract_dataset", [](const std::vector<EncryptionRecord>& records, FeatureMode mode) {
        return extract_dataset(records, mode);
    });

    py::class_<TrainTestSplit>(m, "TrainTestSplit")
        .def_readonly("train_indices", &TrainTestSplit::train_indices)
        .def_readonly("test_indices", &TrainTestSplit::test_indices)
        .def_readonly("stratified", &TrainTestSplit::stratified);

    m.def(
        "split_train_test",
        [](const std::vector<FeatureVector>& dataset, double test_fraction, std::uint64_t seed) {
            return split_train_test(dataset, test_fraction, seed);
        },
        py::arg("dataset"), py::arg("test_fraction"), py::arg("seed"));

    m.def("gini_impurity", &gini_impurity, py::arg("count_false"), py::arg("count_true"));

    py::class_<ForestHyperparams>(m, "ForestHyperparams")
        .def(py::init<>())
        .def_readwrite("tree_count", &ForestHyperparams::tree_count)
        .def_readwrite("max_depth", &ForestHyperparams::max_depth)
        .def_readwrite("min_samples_split", &ForestHyperparams::min_samples_split)
        .def_readwrite("features_per_split", &ForestHyperparams::features_per_split)
        .def_readwrite("bootstrap", &ForestHyperparams::bootstrap);

    py::class_<ForestModel>(m, "ForestModel")
        .def_property_readonly("tree_count",
                               [](const ForestModel& m_) { return m_.trees.size(); })
        .def_readonly("feature_mode", &ForestModel::feature_mode)
        .def_readonly("arity", &ForestModel::arity)
        .def_readonly("training_seed", &ForestModel::training_seed)
        .def("predict", [](const ForestModel& model, const std::vector<double>& features) {
            return model.predict(features);
        });

    m.def(
        "train_forest",
        [](const std::vector<FeatureVector>& train, const ForestHyperparams& params,
           FeatureMode mode, std::uint64_t seed, unsigned workers) {
            return train_forest(train, params, mode, seed, workers);
        },
        py::arg("train"), py::arg("params"), py::arg("mode"), py::arg("seed"),
        py::arg("workers") = 1, py::call_guard<py::gil_scoped_release>());
    m.def("save_model", &save_model, py::arg("model"), py::arg("path"));
    m.def("load_model", &load_model, py::arg("path"));

    py::class_<ConfusionCounts>(m, "ConfusionCounts")
        .def(py::init([](std::uint64_t tp, std::uint64_t fp, std::uint64_t fn, std::uint64_t tn) {
                 return ConfusionCounts{tp, fp, fn, tn};
             }),
             py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"))
        .def_readonly("tp", &ConfusionCounts::tp)
        .def_readonly("fp", &ConfusionCounts::fp)
        .def_readonly("fn", &ConfusionCounts::fn)
        .def_readonly("tn", &ConfusionCounts::tn)
        .def_property_readonly("total", &ConfusionCounts::total);

    py::class_<DetectionMetrics>(m, "DetectionMetrics")
        .def_readonly("accuracy", &DetectionMetrics::accuracy)
        .def_readonly("precision", &DetectionMetrics::precision)
        .def_readonly("recall", &DetectionMetrics::recall)
        .def_readonly("f1", &DetectionMetrics::f1);

    m.def("metrics_from", &metrics_from, py::arg("counts"));

    py::enum_<VerdictKind>(m, "VerdictKind")
        .value("THRESHOLD", VerdictKind::Threshold)
        .value("ML", VerdictKind::Ml);

    m.def("confusion", [](const std::vector<EncryptionRecord>& records, VerdictKind kind) {
        return confusion(records, kind);
    });

    m.def("write_csv", [](const std::vector<EncryptionRecord>& records,
                          const std::filesystem::path& path) { write_csv(records, path); });
    m.def("read_csv", &read_csv, py::arg("path"));

    py::enum_<DetectorChoice>(m, "DetectorChoice")
        .value("THRESHOLD", DetectorChoice::Threshold)
        .value("FOREST", DetectorChoice::Forest)
        .value("BOTH", DetectorChoice::Both);

    py::class_<RunOptions>(m, "RunOptions")
        .def(py::init<>())
        .def_readwrite("experiment", &RunOptions::experiment)
        .def_readwrite("detector", &RunOptions::detector)
        .def_readwrite("test_fraction", &RunOptions::test_fraction)
        .def_readwrite("forest", &RunOptions::forest);

    py::class_<DatasetCounts>(m, "DatasetCounts")
        .def_readonly("blocks", &DatasetCounts::blocks)
        .def_readonly("benign", &DatasetCounts::benign)
        .def_readonly("delay", &DatasetCounts::delay)
        .def_readonly("fault", &DatasetCounts::fault)
        .def_property_readonly("anomalous", &DatasetCounts::anomalous);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("records", &RunResult::records)
        .def_readonly("dataset", &RunResult::dataset)
        .def_readonly("timing", &RunResult::timing)
        .def_readonly("model", &RunResult::model)
        .def_property_readonly("manifest_json", [](const RunResult& r) {
            return manifest_to_json(r.manifest).dump(2);
        });

    m.def("execute_run", &execute_run, py::arg("options"),
          py::call_guard<py::gil_scoped_release>());
}
