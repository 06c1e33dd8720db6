#include "lbf/cross_validation.hpp"

#include <algorithm>
#include <numeric>

#include "lbf/error.hpp"
#include "lbf/metrics.hpp"
#include "lbf/parallel.hpp"
#include "lbf/random.hpp"

namespace lbf {

const std::vector<double>& CvPlan::grid_for(ClassifierKind kind) const {
    switch (kind) {
        case ClassifierKind::svm: return c_grid;
        case ClassifierKind::nn: return lr_grid;
        case ClassifierKind::rf: return delta_grid;
    }
    return c_grid;
}

std::vector<std::size_t> stratified_folds(std::span<const std::uint8_t> labels, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw InvalidArgument("stratified_folds: need at least 2 folds");
    if (labels.size() < folds) throw InvalidArgument("stratified_folds: fewer rows than folds");
    Rng rng(seed);
    std::vector<std::size_t> assignment(labels.size());
    std::size_t dealt = 0;
    for (int label : {1, 0}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) idx.push_back(i);
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        // Continue dealing where the previous class stopped so fold sizes
        // stay balanced overall.
        for (auto i : idx) assignment[i] = dealt++ % folds;
    }
    return assignment;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> fold_split(std::span<const std::size_t> assignment,
                                                                         std::size_t fold) {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < assignment.size(); ++i) (assignment[i] == fold ? test : train).push_back(i);
    return {std::move(train), std::move(test)};
}

double cv_mean_auc(const LabeledDataset& data, const ClassifierSpec& spec, std::size_t folds, std::uint64_t seed) {
    const auto assignment = stratified_folds(data.labels(), folds, seed);
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
        auto [train_idx, test_idx] = fold_split(assignment, f);
        const auto train = data.subset(train_idx);
        const auto test = data.subset(test_idx);
        const auto model = train_classifier(train, spec, mix_seed(seed, 100 + f));
        const auto scores = model->score_all(test);
        total += auc(scores, test.labels());
    }
    return total / static_cast<double>(folds);
}

CvReport nested_cv(const LabeledDataset& data, const ClassifierSpec& spec, const CvPlan& plan) {
    const auto& grid = plan.grid_for(spec.kind);
    if (grid.empty()) throw InvalidArgument("nested_cv: empty hyperparameter grid");
    data.validate();

    CvReport report;
    report.classifier = spec.name();
    report.hyperparameter = spec.kind == ClassifierKind::svm ? "c" : spec.kind == ClassifierKind::nn ? "lr" : "delta";
    report.grid = grid;

    const auto outer = stratified_folds(data.labels(), plan.outer_folds, plan.seed);
    const std::size_t workers = worker_count();
    for (std::size_t f = 0; f < plan.outer_folds; ++f) {
        auto [train_idx, test_idx] = fold_split(outer, f);
        const auto train = data.subset(train_idx);
        const auto test = data.subset(test_idx);
        const std::uint64_t inner_seed = mix_seed(plan.seed, 10 + f);

        CvFold fold;
        fold.inner_mean_auc = parallel_map<double>(grid.size(), workers, [&](std::size_t g) {
            return cv_mean_auc(train, spec.with_non_key(grid[g]), plan.inner_folds, inner_seed);
        });
        const auto best = static_cast<std::size_t>(
            std::max_element(fold.inner_mean_auc.begin(), fold.inner_mean_auc.end()) - fold.inner_mean_auc.begin());
        fold.chosen = grid[best];

        const auto model = train_classifier(train, spec.with_non_key(fold.chosen), mix_seed(plan.seed, 20 + f));
        const auto scores = model->score_all(test);
        fold.auc = auc(scores, test.labels());
        fold.auprc = auprc(scores, test.labels());
        fold.test_indices = std::move(test_idx);
        report.mean_auc += fold.auc;
        report.mean_auprc += fold.auprc;
        report.folds.push_back(std::move(fold));
    }
    report.mean_auc /= static_cast<double>(plan.outer_folds);
    report.mean_auprc /= static_cast<double>(plan.outer_folds);
    return report;
}

}  // namespace lbf
