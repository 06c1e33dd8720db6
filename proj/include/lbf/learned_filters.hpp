#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lbf/bloom.hpp"
#include "lbf/classifier.hpp"
#include "lbf/dataset.hpp"

namespace lbf {

// --- FPR composition -------------------------------------------------------

// eps_tau + (1 - eps_tau) * eps_f.
double lbf_fpr_compose(double eps_tau, double eps_f);

// Backup-filter rate giving overall rate eps: (eps - eps_tau) / (1 - eps_tau).
// Throws InfeasibleThreshold unless 0 <= eps_tau < eps < 1.
double backup_fpr_for_target(double eps, double eps_tau);

// Initial-filter rate of a sandwiched filter, (eps / eps_tau) * (1 - fn_frac),
// valid under eps (1 - fn_frac) <= eps_tau <= 1 - fn_frac.
double slbf_initial_fpr(double eps, double eps_tau, double fn_frac);

// --- Filters ---------------------------------------------------------------

// Optional probe counters, filled by contains() when passed.
struct QueryTrace {
    std::size_t classifier_calls = 0;
    std::size_t initial_probes = 0;
    std::size_t backup_probes = 0;
};

// What the grid search saw when it picked the configuration.
struct BuildInfo {
    double train_fpr = 0.0;
    std::size_t candidates = 0;
    std::vector<std::string> warnings;
};

// Classifier + threshold + backup Bloom filter over the keys scoring <= tau.
// No backup is stored when the classifier accepts every key.
class Lbf {
public:
    Lbf(ClassifierPtr classifier, double tau, std::optional<BloomFilter> backup);

    bool contains(FeatureView x, QueryTrace* trace = nullptr) const;
    bool classifier_accepts(FeatureView x) const { return classifier_->score(x) > tau_; }

    const Classifier& classifier() const { return *classifier_; }
    const ClassifierPtr& classifier_ptr() const { return classifier_; }
    double tau() const { return tau_; }
    const std::optional<BloomFilter>& backup() const { return backup_; }
    std::uint64_t filter_bits() const { return backup_ ? backup_->size_bits() : 0; }
    std::uint64_t total_size_bits() const { return classifier_->size_bits() + filter_bits(); }

    BuildInfo info;

private:
    ClassifierPtr classifier_;
    double tau_;
    std::optional<BloomFilter> backup_;
};

// Initial Bloom filter over all keys in front of an LBF.
class Slbf {
public:
    Slbf(BloomFilter initial, ClassifierPtr classifier, double tau, std::optional<BloomFilter> backup,
         double split = 1.0);

    bool contains(FeatureView x, QueryTrace* trace = nullptr) const;

    const BloomFilter& initial() const { return initial_; }
    const Classifier& classifier() const { return *classifier_; }
    const ClassifierPtr& classifier_ptr() const { return classifier_; }
    double tau() const { return tau_; }
    // Fraction of the post-classifier budget given to the initial filter.
    double split() const { return split_; }
    const std::optional<BloomFilter>& backup() const { return backup_; }
    std::uint64_t filter_bits() const { return initial_.size_bits() + (backup_ ? backup_->size_bits() : 0); }
    std::uint64_t total_size_bits() const { return classifier_->size_bits() + filter_bits(); }

    BuildInfo info;

private:
    BloomFilter initial_;
    ClassifierPtr classifier_;
    double tau_;
    std::optional<BloomFilter> backup_;
    double split_;
};

// Score range cut into groups by increasing interior boundaries; a score s
// falls in group j (0-based) when exactly j boundaries are < s. Group j is
// tested with the first k_per_group[j] probes of one shared bit array; the
// top group has zero probes and accepts outright.
class AdaBf {
public:
    AdaBf(ClassifierPtr classifier, std::vector<double> boundaries, std::vector<unsigned> k_per_group,
          BloomFilter bits, std::size_t groups_requested, double c_bar);

    bool contains(FeatureView x, QueryTrace* trace = nullptr) const;
    std::size_t group_of(double score) const;

    const Classifier& classifier() const { return *classifier_; }
    const ClassifierPtr& classifier_ptr() const { return classifier_; }
    const std::vector<double>& boundaries() const { return boundaries_; }
    const std::vector<unsigned>& k_per_group() const { return k_per_group_; }
    const BloomFilter& bits() const { return bits_; }
    std::size_t groups() const { return k_per_group_.size(); }
    std::size_t groups_requested() const { return groups_requested_; }
    double c_bar() const { return c_bar_; }
    std::uint64_t filter_bits() const { return bits_.size_bits(); }
    std::uint64_t total_size_bits() const { return classifier_->size_bits() + filter_bits(); }

    BuildInfo info;

private:
    ClassifierPtr classifier_;
    std::vector<double> boundaries_;
    std::vector<unsigned> k_per_group_;
    BloomFilter bits_;
    std::size_t groups_requested_;
    double c_bar_;
};

// --- Construction under a total space budget --------------------------------

struct LbfOptions {
    std::size_t tau_grid_size = 15;
    std::uint64_t seed = 0;
};

struct SlbfOptions {
    std::size_t tau_grid_size = 15;
    std::vector<double> split_grid{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::uint64_t seed = 0;
};

struct AdaBfOptions {
    std::size_t g_min = 3;
    std::size_t g_max = 15;
    std::vector<double> c_bar_grid{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
    std::uint64_t seed = 0;
};

// Evenly spaced percentiles (0th..100th, linear interpolation) of the scores,
// ascending and without duplicates.
std::vector<double> threshold_candidates(std::vector<double> scores, std::size_t count);

// Interior group boundaries for g groups such that the non-key count of each
// group is c_bar times that of the group above it. Returns nullopt when the
// scores are too discrete to give strictly increasing boundaries.
std::optional<std::vector<double>> geometric_boundaries(const std::vector<double>& sorted_scores, std::size_t g,
                                                        double c_bar);
// Fallback: equal-count quantile boundaries, duplicates removed.
std::vector<double> quantile_boundaries(const std::vector<double>& sorted_scores, std::size_t g);

// k_j = round(K (g - 1 - j) / (g - 1)) for groups j = 0..g-1.
std::vector<unsigned> adabf_probe_counts(unsigned max_probes, std::size_t g);

// All builders pick their configuration by empirical FPR on train_non_keys
// (first candidate wins ties) and throw BudgetError when the classifier does
// not leave at least one bit of the budget.
Lbf build_lbf(ClassifierPtr classifier, const RowList& keys, const RowList& train_non_keys,
              std::uint64_t budget_bits, const LbfOptions& options = {});
Slbf build_slbf(ClassifierPtr classifier, const RowList& keys, const RowList& train_non_keys,
                std::uint64_t budget_bits, const SlbfOptions& options = {});
AdaBf build_adabf(ClassifierPtr classifier, const RowList& keys, const RowList& train_non_keys,
                  std::uint64_t budget_bits, const AdaBfOptions& options = {});

// --- Any filter -------------------------------------------------------------

using AnyFilter = std::variant<BloomFilter, Lbf, Slbf, AdaBf>;

enum class FilterVariant : std::uint8_t { bf = 0, lbf = 1, slbf = 2, adabf = 3 };

std::string to_string(FilterVariant v);
FilterVariant parse_filter_variant(const std::string& name);
FilterVariant variant_of(const AnyFilter& f);

bool filter_contains(const AnyFilter& f, FeatureView x);
std::uint64_t filter_total_bits(const AnyFilter& f);
double empirical_fpr(const AnyFilter& f, const RowList& non_keys);
// Chosen configuration as "key=value;..." pairs.
std::string describe_filter(const AnyFilter& f);
// Grid-search record of a learned variant; null for a plain Bloom filter.
const BuildInfo* build_info(const AnyFilter& f);

// "LBFF" | version u16 | variant u8 | variant payload. Classifiers and Bloom
// filters are embedded as u64-length-prefixed blocks in their own encodings.
std::vector<std::uint8_t> serialize_filter(const AnyFilter& f);
AnyFilter deserialize_filter(std::span<const std::uint8_t> bytes);

}  // namespace lbf
