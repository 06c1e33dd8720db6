#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lbf/dataset.hpp"
#include "lbf/training.hpp"

namespace lbf {

struct CvPlan {
    std::size_t outer_folds = 3;
    std::size_t inner_folds = 3;
    std::uint64_t seed = 0;
    std::vector<double> c_grid{0.1, 1.0, 10.0, 100.0, 1000.0};
    std::vector<double> delta_grid{1, 3, 5};
    std::vector<double> lr_grid{1e-4, 1e-3};

    const std::vector<double>& grid_for(ClassifierKind kind) const;
};

struct CvFold {
    double auc = 0.0;
    double auprc = 0.0;
    double chosen = 0.0;  // selected non-key hyperparameter
    std::vector<double> inner_mean_auc;  // one per grid point
    std::vector<std::size_t> test_indices;
};

struct CvReport {
    std::string classifier;
    std::string hyperparameter;  // "c", "lr" or "delta"
    std::vector<double> grid;
    std::vector<CvFold> folds;
    double mean_auc = 0.0;
    double mean_auprc = 0.0;
};

// Fold id per row; each label's rows are shuffled and dealt round-robin, so
// every fold gets floor or ceil of its share of each class.
std::vector<std::size_t> stratified_folds(std::span<const std::uint8_t> labels, std::size_t folds, std::uint64_t seed);

// Indices of `data` split into (train, test) for one fold id.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> fold_split(std::span<const std::size_t> assignment,
                                                                         std::size_t fold);

// Mean AUC of one configuration over a stratified k-fold split of `data`.
double cv_mean_auc(const LabeledDataset& data, const ClassifierSpec& spec, std::size_t folds, std::uint64_t seed);

// Outer loop estimates generalization; in each outer round the non-key
// hyperparameter is picked by grid search on the inner folds of the outer
// training part (best mean AUC, first grid point on ties), the model is
// retrained on the whole outer training part and scored on the outer test
// fold.
CvReport nested_cv(const LabeledDataset& data, const ClassifierSpec& spec, const CvPlan& plan);

}  // namespace lbf
