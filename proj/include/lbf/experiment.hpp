#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "lbf/datagen.hpp"
#include "lbf/dataset.hpp"
#include "lbf/learned_filters.hpp"
#include "lbf/timing.hpp"
#include "lbf/training.hpp"

namespace lbf {

// Where an experiment's data comes from.
struct DatasetSource {
    enum class Kind { synthetic, csv, url, dna };
    Kind kind = Kind::synthetic;
    SynthConfig synthetic;
    std::string path;  // csv / url: the CSV; dna: one k-mer per line (the keys)
    std::size_t kmer_length = 14;
    double dna_negative_ratio = 1.0;  // sampled non-keys per key

    LabeledDataset load(std::uint64_t seed) const;
    std::string describe() const;
};

struct ExperimentConfig {
    std::string name = "experiment";
    DatasetSource dataset;
    ClassifierSpec classifier;
    std::vector<FilterVariant> variants{FilterVariant::lbf, FilterVariant::slbf, FilterVariant::adabf};
    std::vector<double> epsilons{0.05, 0.01};
    std::uint64_t seed = 0;
    double train_non_key_fraction = 0.3;

    std::size_t tau_grid_size = 15;
    std::vector<double> split_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::size_t g_min = 3;
    std::size_t g_max = 15;
    std::vector<double> c_bar_grid{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};

    bool measure_time = true;
    TimingOptions timing;

    void validate() const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& cfg);
void from_json(const nlohmann::json& j, ExperimentConfig& cfg);

struct DataSplit {
    LabeledDataset train;  // every key plus the training share of non-keys
    LabeledDataset query;  // remaining non-keys only
};

// All keys plus round(fraction * #non-keys) uniformly chosen non-keys go to
// train; the other non-keys form the query set. Throws InvalidArgument when
// there are no keys or fewer than 10 non-keys.
DataSplit split_data(const LabeledDataset& data, std::uint64_t seed, double train_non_key_fraction = 0.3);

// One (variant, budget) cell.
struct ExperimentRow {
    std::string config;
    std::string dataset;
    std::string classifier;
    std::string variant;
    double epsilon = 0.0;
    std::uint64_t budget_bits = 0;
    std::uint64_t classifier_bits = 0;
    std::uint64_t filter_bits = 0;  // all constituent Bloom filters
    std::uint64_t total_bits = 0;
    std::string status = "ok";  // "ok" or "infeasible"
    double fpr = 0.0;           // on the query set
    double train_fpr = 0.0;     // what the grid search saw
    std::size_t queries = 0;
    std::size_t false_negatives = 0;
    std::string hyperparameters;  // "key=value;..." of the chosen configuration
    std::uint64_t seed = 0;
    std::optional<double> reject_ns;   // seconds per query * 1e9
    std::optional<double> reject_pct;  // vs the baseline of the same budget
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    std::vector<std::string> warnings;
    double classifier_auc = 0.0;  // on train keys vs query non-keys
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

// CSV column order; timing columns come last so that determinism checks can
// drop them.
const std::vector<std::string>& report_columns();
inline constexpr std::size_t kTimingColumns = 2;
inline constexpr int kReportSchemaVersion = 1;

std::string csv_header();
std::string csv_line(const ExperimentRow& row);

// Runs every config in order, appending rows to `csv_path` as each config
// finishes, and writes a JSON sidecar (csv_path with extension .json) with
// the configs, seeds, grids and warnings.
void sweep(const std::vector<ExperimentConfig>& configs, const std::string& csv_path);

// A sweep file is either one config object or {"experiments": [...]}.
std::vector<ExperimentConfig> load_sweep_configs(const std::string& path);

}  // namespace lbf
