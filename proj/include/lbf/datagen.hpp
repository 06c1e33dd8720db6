#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lbf/dataset.hpp"

namespace lbf {

// Synthetic family: x ~ N(0, gamma I_q), key iff x2 - a x1^2 > 0.
struct SynthConfig {
    double a = 0.01;
    double r = 0.0;    // fraction of positives (and as many negatives) flipped
    double rho = 1.0;  // negatives per positive
    std::size_t n1 = 10'000;
    std::size_t q = 2;
    double gamma = 5.0;
    std::uint64_t seed = 0;
    // Draws allowed before GenerationTimeout; 0 means 1000 * (n1 + n2) + 10^6.
    std::uint64_t max_draws = 0;

    std::size_t n2() const;
    void validate() const;
};

int parabola_label(double x1, double x2, double a);

// Rejection-samples exactly n1 positives and n2 negatives, then flips
// floor(r n1) random positives and as many random negatives.
LabeledDataset generate(const SynthConfig& cfg);

// Comma-separated, one header row, q feature columns then a 0/1 label
// column. Errors carry the 1-based line number. q = 0 infers q from the
// header.
LabeledDataset load_csv(const std::string& path, std::size_t q = 0);
LabeledDataset load_url_csv(const std::string& path);  // q = 17
void save_csv(const LabeledDataset& data, const std::string& path);

// A -> 0, T -> 1, C -> 2, G -> 3.
std::vector<double> encode_kmer(const std::string& kmer, std::size_t k = 14);
std::uint64_t kmer_code(const std::string& kmer, std::size_t k = 14);
std::string kmer_from_code(std::uint64_t code, std::size_t k = 14);

// n distinct k-mers drawn uniformly from those not in `exclude`, in draw
// order. Throws InvalidArgument when fewer than n such k-mers exist.
std::vector<std::string> sample_negative_kmers(std::size_t n, std::size_t k, const std::vector<std::string>& exclude,
                                               std::uint64_t seed);

// One k-mer per line; blank lines are skipped.
std::vector<std::string> load_kmer_file(const std::string& path, std::size_t k = 14);

// Keys labeled 1, sampled negatives labeled 0, q = k.
LabeledDataset kmer_dataset(const std::vector<std::string>& keys, const std::vector<std::string>& non_keys,
                            std::size_t k = 14);

}  // namespace lbf
