#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lbf/classifier.hpp"
#include "lbf/dataset.hpp"

namespace lbf {

// Everything needed to train one classifier: the kind, its key
// hyperparameters (which set the model size), the non-key hyperparameter
// value, and the imbalance handling switch.
struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::svm;
    std::vector<std::size_t> hidden{25};  // NN widths (key)
    std::size_t trees = 10;               // RF t (key)
    // Cost-sensitive SVM/NN, imbalance-aware bootstrap for RF.
    bool cost_sensitive = false;

    double c = 1.0;            // SVM (non-key)
    double lr = 1e-3;          // NN (non-key)
    std::size_t min_leaf = 1;  // RF delta (non-key)

    std::size_t nn_epochs = 40;
    std::size_t svm_epochs = 300;

    std::string name() const;
    // Value of the non-key hyperparameter for this kind.
    double non_key_value() const;
    ClassifierSpec with_non_key(double value) const;
};

ClassifierPtr train_classifier(const LabeledDataset& data, const ClassifierSpec& spec, std::uint64_t seed);

// Number of workers for parallel grid evaluation: LBF_THREADS if set,
// otherwise the hardware concurrency.
std::size_t worker_count();

}  // namespace lbf
