#include "aeslab/report.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aeslab {

namespace {

std::string format_delay_ms(double delay_ms) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", delay_ms);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::optional<bool> parse_optional_bool(const std::string& s, const std::string& column,
                                        std::size_t line_no) {
    if (s.empty()) return std::nullopt;
    if (s == "true") return true;
    if (s == "false") return false;
    throw std::runtime_error("bad " + column + " value \"" + s + "\" on line " +
                             std::to_string(line_no));
}

}  // namespace

void write_csv(std::span<const EncryptionRecord> records, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open CSV for writing: " + path.string());
    }
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.index << ',' << to_string(r.anomaly.type) << ',';
        if (r.anomaly.type == AnomalyType::Delay) out << format_delay_ms(r.anomaly.delay_ms);
        out << ',' << to_hex(r.plaintext) << ',' << to_hex(r.ciphertext) << ','
            << r.duration_ns << ',';
        if (r.flagged_threshold) out << (*r.flagged_threshold ? "true" : "false");
        out << ',';
        if (r.flagged_ml) out << (*r.flagged_ml ? "true" : "false");
        out << ',' << to_string(r.split) << '\n';
    }
    if (!out.flush()) {
        throw std::runtime_error("failed writing CSV: " + path.string());
    }
}

std::vector<EncryptionRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open CSV: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("unrecognized CSV header in " + path.string());
    }

    std::vector<EncryptionRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 9) {
            throw std::runtime_error("expected 9 fields on line " + std::to_string(line_no) +
                                     " of " + path.string());
        }
        try {
            EncryptionRecord r;
            r.index = std::stoull(fields[0]);
            const auto type = anomaly_type_from_string(fields[1]);
            if (type == AnomalyType::Delay) {
                if (fields[2].empty()) {
                    throw std::runtime_error("delay row missing delay_ms");
                }
                r.anomaly = Anomaly::delay(std::stod(fields[2]));
            } else if (type == AnomalyType::Fault) {
                r.anomaly = Anomaly::fault();
            }
            r.plaintext = block_from_hex(fields[3]);
            r.ciphertext = block_from_hex(fields[4]);
            r.duration_ns = std::stoull(fields[5]);
            r.flagged_threshold = parse_optional_bool(fields[6], "flagged_threshold", line_no);
            r.flagged_ml = parse_optional_bool(fields[7], "flagged_ml", line_no);
            r.split = split_tag_from_string(fields[8]);
            records.push_back(r);
        } catch (const std::exception& e) {
            throw std::runtime_error("bad CSV row on line " + std::to_string(line_no) + " of " +
                                     path.string() + ": " + e.what());
        }
    }
    return records;
}

std::string_view to_string(DetectorChoice choice) {
    switch (choice) {
        case DetectorChoice::Threshold: return "threshold";
        case DetectorChoice::Forest: return "forest";
        case DetectorChoice::Both: return "both";
    }
    throw std::logic_error("unreachable detector choice");
}

DetectorChoice detector_choice_from_string(std::string_view name) {
    if (name == "threshold") return DetectorChoice::Threshold;
    if (name == "forest") return DetectorChoice::Forest;
    if (name == "both") return DetectorChoice::Both;
    throw std::invalid_argument("unknown detector \"" + std::string(name) + "\"");
}

DatasetCounts count_dataset(std::span<const EncryptionRecord> records) {
    DatasetCounts counts;
    counts.blocks = records.size();
    for (const auto& r : records) {
        switch (r.anomaly.type) {
            case AnomalyType::None: ++counts.benign; break;
            case AnomalyType::Delay: ++counts.delay; break;
            case AnomalyType::Fault: ++counts.fault; break;
        }
    }
    return counts;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json metrics_to_json(const DetectionMetrics& m) {
    auto field = [](const std::optional<double>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    return {{"accuracy", field(m.accuracy)},
            {"precision", field(m.precision)},
            {"recall", field(m.recall)},
            {"f1", field(m.f1)}};
}

DetectionMetrics metrics_from_json(const ordered_json& j) {
    DetectionMetrics m;
    auto field = [&](const char* key) -> std::optional<double> {
        const auto& v = j.at(key);
        if (v.is_null()) return std::nullopt;
        return v.get<double>();
    };
    m.accuracy = field("accuracy");
    m.precision = field("precision");
    m.recall = field("recall");
    m.f1 = field("f1");
    return m;
}

ordered_json detector_report_to_json(const DetectorReport& r) {
    return {{"population", r.population},
            {"evaluated", r.evaluated},
            {"confusion",
             {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"fn", r.counts.fn}, {"tn", r.counts.tn}}},
            {"metrics", metrics_to_json(r.metrics)}};
}

DetectorReport detector_report_from_json(const ordered_json& j) {
    DetectorReport r;
    r.population = j.at("population").get<std::string>();
    r.evaluated = j.at("evaluated").get<std::uint64_t>();
    const auto& c = j.at("confusion");
    r.counts = {c.at("tp").get<std::uint64_t>(), c.at("fp").get<std::uint64_t>(),
                c.at("fn").get<std::uint64_t>(), c.at("tn").get<std::uint64_t>()};
    r.metrics = metrics_from_json(j.at("metrics"));
    return r;
}

constexpr std::string_view kManifestFormat = "aeslab-run-manifest";
constexpr int kManifestVersion = 1;

}  // namespace

nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
    ordered_json config;
    config["blocks"] = m.config.injection.block_count;
    config["anomaly_ratio"] = m.config.injection.anomaly_ratio;
    config["delay_min_ms"] = m.config.injection.delay_min_ms;
    config["delay_max_ms"] = m.config.injection.delay_max_ms;
    config["plaintext"] = to_string(m.config.injection.plaintext_source);
    config["master_seed"] = m.config.injection.master_seed;
    config["workers"] = m.config.worker_count;
    ordered_json timing;
    timing["mode"] = to_string(m.config.timing.mode);
    if (m.config.timing.mode == ClockMode::Simulated) {
        timing["baseline_mean_ms"] = m.config.timing.baseline_mean_ms;
        timing["baseline_jitter_ms"] = m.config.timing.baseline_jitter_ms;
    }
    config["timing"] = timing;
    config["features"] = to_string(m.config.feature_mode);
    config["detector"] = to_string(m.detector);
    config["test_fraction"] = m.test_fraction;
    config["forest"] = {{"tree_count", m.forest.tree_count},
                        {"max_depth", m.forest.max_depth},
                        {"min_samples_split", m.forest.min_samples_split},
                        {"features_per_split", m.forest.features_per_split},
                        {"bootstrap", m.forest.bootstrap}};

    ordered_json j;
    j["format"] = kManifestFormat;
    j["version"] = kManifestVersion;
    j["tool_version"] = m.tool_version;
    j["config"] = config;
    j["experiment_key_hex"] = m.experiment_key_hex;
    j["dataset"] = {{"blocks", m.dataset.blocks},
                    {"benign", m.dataset.benign},
                    {"delay", m.dataset.delay},
                    {"fault", m.dataset.fault},
                    {"anomalous", m.dataset.anomalous()}};
    j["timing_stats"] = {{"mean_ns", m.timing.mean_ns},
                         {"min_ns", m.timing.min_ns},
                         {"max_ns", m.timing.max_ns},
                         {"count", m.timing.count},
                         {"threshold_ns", m.timing.threshold_ns}};
    j["split"] = m.split ? ordered_json{{"train", m.split->train_count},
                                        {"test", m.split->test_count},
                                        {"stratified", m.split->stratified}}
                         : ordered_json(nullptr);
    j["detectors"] = {
        {"threshold",
         m.threshold_report ? detector_report_to_json(*m.threshold_report) : ordered_json(nullptr)},
        {"ml", m.ml_report ? detector_report_to_json(*m.ml_report) : ordered_json(nullptr)}};
    j["timestamps"] = {{"started_at", m.started_at}, {"finished_at", m.finished_at}};
    return j;
}

RunManifest manifest_from_json(const nlohmann::ordered_json& j) {
    if (j.value("format", "") != kManifestFormat || j.value("version", -1) != kManifestVersion) {
        throw std::runtime_error("unrecognized manifest format");
    }
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();

    const auto& config = j.at("config");
    m.config.injection.block_count = config.at("blocks").get<std::uint64_t>();
    m.config.injection.anomaly_ratio = config.at("anomaly_ratio").get<double>();
    m.config.injection.delay_min_ms = config.at("delay_min_ms").get<double>();
    m.config.injection.delay_max_ms = config.at("delay_max_ms").get<double>();
    m.config.injection.plaintext_source =
        plaintext_source_from_string(config.at("plaintext").get<std::string>());
    m.config.injection.master_seed = config.at("master_seed").get<std::uint64_t>();
    m.config.worker_count = config.at("workers").get<unsigned>();
    const auto& timing = config.at("timing");
    m.config.timing.mode = clock_mode_from_string(timing.at("mode").get<std::string>());
    if (m.config.timing.mode == ClockMode::Simulated) {
        m.config.timing.baseline_mean_ms = timing.at("baseline_mean_ms").get<double>();
        m.config.timing.baseline_jitter_ms = timing.at("baseline_jitter_ms").get<double>();
    }
    m.config.feature_mode = feature_mode_from_string(config.at("features").get<std::string>());
    m.detector = detector_choice_from_string(config.at("detector").get<std::string>());
    m.test_fraction = config.at("test_fraction").get<double>();
    const auto& forest = config.at("forest");
    m.forest.tree_count = forest.at("tree_count").get<std::uint32_t>();
    m.forest.max_depth = forest.at("max_depth").get<std::uint32_t>();
    m.forest.min_samples_split = forest.at("min_samples_split").get<std::uint32_t>();
    m.forest.features_per_split = forest.at("features_per_split").get<std::uint32_t>();
    m.forest.bootstrap = forest.at("bootstrap").get<bool>();

    m.experiment_key_hex = j.at("experiment_key_hex").get<std::string>();
    const auto& dataset = j.at("dataset");
    m.dataset.blocks = dataset.at("blocks").get<std::uint64_t>();
    m.dataset.benign = dataset.at("benign").get<std::uint64_t>();
    m.dataset.delay = dataset.at("delay").get<std::uint64_t>();
    m.dataset.fault = dataset.at("fault").get<std::uint64_t>();
    const auto& stats = j.at("timing_stats");
    m.timing.mean_ns = stats.at("mean_ns").get<double>();
    m.timing.min_ns = stats.at("min_ns").get<std::uint64_t>();
    m.timing.max_ns = stats.at("max_ns").get<std::uint64_t>();
    m.timing.count = stats.at("count").get<std::uint64_t>();
    m.timing.threshold_ns = stats.at("threshold_ns").get<double>();

    if (!j.at("split").is_null()) {
        const auto& split = j.at("split");
        m.split = SplitSummary{split.at("train").get<std::uint64_t>(),
                               split.at("test").get<std::uint64_t>(),
                               split.at("stratified").get<bool>()};
    }
    const auto& detectors = j.at("detectors");
    if (!detectors.at("threshold").is_null()) {
        m.threshold_report = detector_report_from_json(detectors.at("threshold"));
    }
    if (!detectors.at("ml").is_null()) {
        m.ml_report = detector_report_from_json(detectors.at("ml"));
    }
    const auto& timestamps = j.at("timestamps");
    m.started_at = timestamps.at("started_at").get<std::string>();
    m.finished_at = timestamps.at("finished_at").get<std::string>();
    return m;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open manifest for writing: " + path.string());
    }
    out << manifest_to_json(manifest).dump(2) << '\n';
    if (!out.flush()) {
        throw std::runtime_error("failed writing manifest: " + path.string());
    }
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open manifest: " + path.string());
    }
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("cannot parse manifest " + path.string() + ": " + e.what());
    }
    return manifest_from_json(j);
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace aeslab
