#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "lbf/cross_validation.hpp"
#include "lbf/error.hpp"
#include "lbf/metrics.hpp"
#include "lbf/parallel.hpp"

using namespace lbf;

namespace {

using Labels = std::vector<std::uint8_t>;

// Fraction of (positive, negative) pairs ranked correctly, ties worth 1/2.
double auc_by_pairs(const std::vector<double>& s, const Labels& y) {
    double good = 0;
    double pairs = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (y[i] != 1) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (y[j] != 0) continue;
            pairs += 1;
            good += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
        }
    }
    return good / pairs;
}

// Average precision straight from its definition: for every distinct
// threshold t (descending), precision and recall of {s >= t}.
double ap_by_thresholds(const std::vector<double>& s, const Labels& y) {
    std::set<double, std::greater<>> thresholds(s.begin(), s.end());
    const double positives = std::count(y.begin(), y.end(), 1);
    double ap = 0;
    double prev_recall = 0;
    for (double t : thresholds) {
        double tp = 0;
        double predicted = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] >= t) {
                predicted += 1;
                tp += y[i];
            }
        }
        const double recall = tp / positives;
        ap += (recall - prev_recall) * tp / predicted;
        prev_recall = recall;
    }
    return ap;
}

LabeledDataset threshold_data(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    LabeledDataset d(3);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> x{u(rng), u(rng), u(rng)};
        d.add(x, x[0] > 0.1 ? 1 : 0);
    }
    return d;
}

LabeledDataset noise_data(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1);
    std::bernoulli_distribution coin(0.5);
    LabeledDataset d(2);
    for (std::size_t i = 0; i < n; ++i) d.add(std::vector<double>{g(rng), g(rng)}, coin(rng));
    return d;
}

}  // namespace

TEST(Auc, Examples) {
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{1, 0, 1, 0}, Labels{1, 0, 1, 0}), 1.0);
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{0, 1, 0, 1}, Labels{1, 0, 1, 0}), 0.0);
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.9, 0.8, 0.7, 0.6}, Labels{1, 0, 1, 0}), 0.75);
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.5, 0.5}, Labels{1, 0}), 0.5);
}

TEST(Auc, MatchesPairEnumeration) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> level(0, 4);  // coarse scores force ties
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + trial % 9;
        std::vector<double> s(n);
        Labels y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = level(rng) / 4.0;
            y[i] = static_cast<std::uint8_t>(i % 2);
        }
        std::shuffle(y.begin(), y.end(), rng);
        EXPECT_NEAR(auc(s, y), auc_by_pairs(s, y), 1e-12);
    }
}

TEST(Auc, MonotoneTransformInvarianceAndComplement) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0, 1);
    std::vector<double> s(200);
    Labels y(200);
    for (std::size_t i = 0; i < s.size(); ++i) {
        y[i] = static_cast<std::uint8_t>(i % 3 == 0);
        s[i] = g(rng) + y[i];
    }
    std::vector<double> transformed(s.size());
    std::vector<double> inverted(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        transformed[i] = 1.0 / (1.0 + std::exp(-3 * s[i] + 1));
        inverted[i] = -s[i];
    }
    EXPECT_NEAR(auc(s, y), auc(transformed, y), 1e-12);
    EXPECT_NEAR(auc(s, y) + auc(inverted, y), 1.0, 1e-12);
}

TEST(Auc, Errors) {
    EXPECT_THROW(auc(std::vector<double>{0.1, 0.2}, Labels{1, 1}), UndefinedMetric);
    EXPECT_THROW(auc(std::vector<double>{0.1}, Labels{1, 0}), InvalidArgument);
}

TEST(Auprc, Examples) {
    EXPECT_DOUBLE_EQ(auprc(std::vector<double>{0.9, 0.8, 0.2, 0.1}, Labels{1, 1, 0, 0}), 1.0);
    // Constant scores: one threshold, precision = positive fraction.
    EXPECT_DOUBLE_EQ(auprc(std::vector<double>{0.3, 0.3, 0.3, 0.3, 0.3}, Labels{1, 0, 0, 1, 0}), 0.4);
    // Hand computation: thresholds 0.9 (P=1, R=1/2), 0.8 (P=1/2, R=1/2),
    // 0.7 (P=2/3, R=1): AP = 1/2 * 1 + 0 + 1/2 * 2/3 = 5/6.
    EXPECT_NEAR(auprc(std::vector<double>{0.9, 0.8, 0.7}, Labels{1, 0, 1}), 5.0 / 6.0, 1e-12);
}

TEST(Auprc, MatchesDefinition) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> level(0, 5);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 10;
        std::vector<double> s(n);
        Labels y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = level(rng) / 5.0;
            y[i] = static_cast<std::uint8_t>(rng() % 2);
        }
        y[rng() % n] = 1;
        EXPECT_NEAR(auprc(s, y), ap_by_thresholds(s, y), 1e-12);
    }
}

TEST(Auprc, Errors) { EXPECT_THROW(auprc(std::vector<double>{0.1, 0.2}, Labels{0, 0}), UndefinedMetric); }

TEST(Folds, StratifiedPartition) {
    Labels y(100);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = i < 17;
    const auto a = stratified_folds(y, 3, 5);
    ASSERT_EQ(a.size(), y.size());
    for (std::size_t f = 0; f < 3; ++f) {
        std::size_t pos = 0;
        std::size_t total = 0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (a[i] != f) continue;
            ++total;
            pos += y[i];
        }
        EXPECT_TRUE(pos == 5 || pos == 6);
        EXPECT_TRUE(total == 33 || total == 34);
    }
    const auto [train, test] = fold_split(a, 1);
    EXPECT_EQ(train.size() + test.size(), y.size());
    std::set<std::size_t> all(train.begin(), train.end());
    for (auto i : test) EXPECT_TRUE(all.insert(i).second);
    EXPECT_EQ(a, stratified_folds(y, 3, 5));
    EXPECT_THROW(stratified_folds(y, 1, 0), InvalidArgument);
}

TEST(NestedCv, SeparableDataGivesHighAuc) {
    const auto d = threshold_data(300, 1);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::svm;
    const auto report = nested_cv(d, spec, CvPlan{});
    EXPECT_GE(report.mean_auc, 0.99);
    EXPECT_EQ(report.hyperparameter, "c");
    EXPECT_EQ(report.folds.size(), 3u);
    for (const auto& f : report.folds) {
        EXPECT_EQ(f.inner_mean_auc.size(), report.grid.size());
        EXPECT_GE(f.auprc, 0.0);
        EXPECT_LE(f.auprc, 1.0);
    }
}

TEST(NestedCv, OuterTestFoldsPartitionData) {
    const auto d = threshold_data(90, 2);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::rf;
    spec.trees = 3;
    const auto report = nested_cv(d, spec, CvPlan{});
    std::vector<int> seen(d.size(), 0);
    for (const auto& f : report.folds)
        for (auto i : f.test_indices) ++seen[i];
    for (int s : seen) EXPECT_EQ(s, 1);
}

TEST(NestedCv, RandomLabelsNearChance) {
    for (auto kind : {ClassifierKind::svm, ClassifierKind::rf, ClassifierKind::nn}) {
        ClassifierSpec spec;
        spec.kind = kind;
        spec.hidden = {5};
        spec.nn_epochs = 5;
        CvPlan plan;
        plan.seed = 4;
        const auto report = nested_cv(noise_data(300, 7), spec, plan);
        EXPECT_NEAR(report.mean_auc, 0.5, 0.1) << spec.name();
    }
}

TEST(NestedCv, DeterministicAndPicksFirstOnTies) {
    const auto d = threshold_data(120, 3);
    ClassifierSpec spec;
    spec.kind = ClassifierKind::rf;
    spec.trees = 2;
    CvPlan plan;
    plan.delta_grid = {1, 1};  // identical grid points tie exactly
    const auto a = nested_cv(d, spec, plan);
    const auto b = nested_cv(d, spec, plan);
    ASSERT_EQ(a.folds.size(), b.folds.size());
    for (std::size_t i = 0; i < a.folds.size(); ++i) {
        EXPECT_EQ(a.folds[i].auc, b.folds[i].auc);
        EXPECT_EQ(a.folds[i].inner_mean_auc, b.folds[i].inner_mean_auc);
        EXPECT_EQ(a.folds[i].inner_mean_auc[0], a.folds[i].inner_mean_auc[1]);
    }
    EXPECT_EQ(a.mean_auc, b.mean_auc);
}

TEST(NestedCv, EmptyGridRejected) {
    ClassifierSpec spec;
    CvPlan plan;
    plan.c_grid.clear();
    EXPECT_THROW(nested_cv(threshold_data(60, 1), spec, plan), InvalidArgument);
}

TEST(ParallelMap, OrderIndependentOfWorkers) {
    auto square = [](std::size_t i) { return static_cast<double>(i * i); };
    EXPECT_EQ(parallel_map<double>(50, 1, square), parallel_map<double>(50, 4, square));
    EXPECT_THROW(parallel_map<int>(10, 3, [](std::size_t i) -> int {
                     if (i == 7) throw InvalidArgument("boom");
                     return 0;
                 }),
                 InvalidArgument);
}
