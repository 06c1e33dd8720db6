#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "lbf/bloom.hpp"
#include "lbf/datagen.hpp"
#include "lbf/error.hpp"
#include "lbf/learned_filters.hpp"
#include "lbf/random.hpp"
#include "lbf/random_forest.hpp"
#include "lbf/svm.hpp"
#include "lbf/timing.hpp"

using namespace lbf;

namespace {

// Scores through an arbitrary function; encodes as an SVM-sized header only.
class FnScorer final : public Classifier {
public:
    FnScorer(std::size_t q, std::function<double(std::span<const double>)> fn) : q_(q), fn_(std::move(fn)) {}
    ClassifierKind kind() const override { return ClassifierKind::svm; }
    std::size_t dimension() const override { return q_; }
    std::string name() const override { return "fn"; }

protected:
    double score_unchecked(std::span<const double> x) const override { return fn_(x); }
    void encode_payload(ByteWriter&) const override {}

private:
    std::size_t q_;
    std::function<double(std::span<const double>)> fn_;
};

// Row = (random id, flag); keys carry flag 1.
struct Fixture {
    std::vector<std::vector<double>> key_store, non_key_store, query_store;
    RowList keys, non_keys, queries;
};

Fixture flagged(std::size_t n_keys, std::size_t n_non_keys, std::size_t n_queries, std::uint64_t seed) {
    Fixture f;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 1e9);
    for (std::size_t i = 0; i < n_keys; ++i) f.key_store.push_back({u(rng), 1.0});
    for (std::size_t i = 0; i < n_non_keys; ++i) f.non_key_store.push_back({u(rng), 0.0});
    for (std::size_t i = 0; i < n_queries; ++i) f.query_store.push_back({u(rng), 0.0});
    for (auto& r : f.key_store) f.keys.push_back(r);
    for (auto& r : f.non_key_store) f.non_keys.push_back(r);
    for (auto& r : f.query_store) f.queries.push_back(r);
    return f;
}

const auto perfect = std::make_shared<FnScorer>(2, [](std::span<const double> x) { return x[1]; });
const auto constant = std::make_shared<FnScorer>(2, [](std::span<const double>) { return 0.5; });

// Synthetic data split into keys, training non-keys and query non-keys.
struct SynthFixture {
    LabeledDataset data;
    RowList keys, non_keys, queries;
};

SynthFixture synthetic(double a, double r, std::size_t n1, std::uint64_t seed) {
    SynthFixture f;
    f.data = generate({.a = a, .r = r, .rho = 1.0, .n1 = n1, .seed = seed});
    std::size_t seen_neg = 0;
    for (std::size_t i = 0; i < f.data.size(); ++i) {
        if (f.data.label(i)) {
            f.keys.push_back(f.data.row(i));
        } else {
            (seen_neg++ % 10 < 3 ? f.non_keys : f.queries).push_back(f.data.row(i));
        }
    }
    return f;
}

template <typename Filter>
void expect_no_false_negatives(const Filter& filter, const RowList& keys) {
    for (auto k : keys) ASSERT_TRUE(filter.contains(k));
}

double sigma(double p, std::size_t n) { return std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(n)); }

}  // namespace

// --- Composition math ----------------------------------------------------------

TEST(Compose, Examples) {
    EXPECT_NEAR(lbf_fpr_compose(0.1, 0.1), 0.19, 1e-15);
    EXPECT_DOUBLE_EQ(lbf_fpr_compose(0.0, 0.3), 0.3);
    EXPECT_DOUBLE_EQ(lbf_fpr_compose(0.3, 0.0), 0.3);
    EXPECT_DOUBLE_EQ(lbf_fpr_compose(1.0, 0.42), 1.0);
    EXPECT_THROW(lbf_fpr_compose(1.5, 0.1), InvalidArgument);
}

TEST(BackupRate, ExamplesAndRoundTrip) {
    EXPECT_NEAR(backup_fpr_for_target(0.05, 0.02), 0.03 / 0.98, 1e-15);
    EXPECT_DOUBLE_EQ(backup_fpr_for_target(0.07, 0.0), 0.07);
    EXPECT_THROW(backup_fpr_for_target(0.05, 0.05), InfeasibleThreshold);
    EXPECT_THROW(backup_fpr_for_target(0.05, 0.2), InfeasibleThreshold);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 100; ++i) {
        const double eps = 0.001 + 0.998 * u(rng);
        const double eps_tau = eps * u(rng) * 0.999;
        const double f = backup_fpr_for_target(eps, eps_tau);
        EXPECT_GT(f, 0.0);
        EXPECT_LT(f, 1.0);
        EXPECT_NEAR(lbf_fpr_compose(eps_tau, f), eps, 1e-15);
    }
}

TEST(InitialRate, ExamplesAndConstraint) {
    EXPECT_NEAR(slbf_initial_fpr(0.01, 0.1, 0.2), 0.08, 1e-15);
    EXPECT_NEAR(slbf_initial_fpr(0.01, 0.8, 0.2), 0.01, 1e-15);
    EXPECT_NEAR(slbf_initial_fpr(0.01, 0.01 * 0.8, 0.2), 1.0, 1e-12);
    EXPECT_THROW(slbf_initial_fpr(0.01, 0.9, 0.2), InfeasibleThreshold);
    EXPECT_THROW(slbf_initial_fpr(0.01, 0.001, 0.2), InfeasibleThreshold);
    EXPECT_THROW(slbf_initial_fpr(0.01, 0.0, 0.2), InvalidArgument);
}

// --- Grid helpers --------------------------------------------------------------

TEST(Thresholds, EvenlySpacedPercentiles) {
    std::vector<double> s(101);
    std::iota(s.begin(), s.end(), 0.0);
    std::shuffle(s.begin(), s.end(), std::mt19937_64(2));
    EXPECT_EQ(threshold_candidates(s, 5), (std::vector<double>{0, 25, 50, 75, 100}));
    EXPECT_EQ(threshold_candidates({1.0, 2.0}, 3), (std::vector<double>{1.0, 1.5, 2.0}));
    EXPECT_EQ(threshold_candidates({0.3, 0.3, 0.3}, 15), (std::vector<double>{0.3}));
    EXPECT_EQ(threshold_candidates(s, 15).size(), 15u);
    EXPECT_THROW(threshold_candidates({}, 3), InvalidArgument);
}

TEST(Groups, GeometricBoundaries) {
    std::vector<double> s(700);
    std::iota(s.begin(), s.end(), 0.0);
    // Group sizes bottom-up 400, 200, 100.
    EXPECT_EQ(*geometric_boundaries(s, 3, 2.0), (std::vector<double>{399, 599}));
    EXPECT_EQ(*geometric_boundaries(s, 2, 1.0), (std::vector<double>{349}));
    const std::vector<double> coarse{0, 0, 0, 0, 0, 0, 0, 0, 1, 1};
    EXPECT_FALSE(geometric_boundaries(coarse, 5, 1.0).has_value());
    EXPECT_EQ(quantile_boundaries(coarse, 5), (std::vector<double>{0}));
}

TEST(Groups, ProbeCounts) {
    EXPECT_EQ(adabf_probe_counts(6, 4), (std::vector<unsigned>{6, 4, 2, 0}));
    EXPECT_EQ(adabf_probe_counts(7, 3), (std::vector<unsigned>{7, 4, 0}));  // 3.5 rounds away from zero
    EXPECT_EQ(adabf_probe_counts(1, 2), (std::vector<unsigned>{1, 0}));
}

// --- LBF -----------------------------------------------------------------------

TEST(Lbf, PerfectClassifierNeedsNoBackup) {
    auto f = flagged(500, 1000, 5000, 1);
    const auto lbf = build_lbf(perfect, f.keys, f.non_keys, 10000);
    EXPECT_FALSE(lbf.backup().has_value());
    EXPECT_DOUBLE_EQ(empirical_fpr(lbf, f.queries), 0.0);
    expect_no_false_negatives(lbf, f.keys);
}

TEST(Lbf, ConstantClassifierIsBackupOnly) {
    auto f = flagged(1000, 1000, 20000, 2);
    const std::uint64_t budget = 10000;
    const auto lbf = build_lbf(constant, f.keys, f.non_keys, budget, {.seed = 7});
    ASSERT_TRUE(lbf.backup().has_value());
    const std::uint64_t m = budget - constant->size_bits();
    const auto bf = BloomFilter::build(f.keys, m, optimal_k(m, f.keys.size()), mix_seed(7, 1));
    EXPECT_EQ(*lbf.backup(), bf);
    EXPECT_DOUBLE_EQ(empirical_fpr(lbf, f.queries), empirical_fpr(bf, f.queries));
}

TEST(Lbf, BudgetAndErrors) {
    auto f = flagged(10, 20, 0, 3);
    EXPECT_THROW(build_lbf(constant, f.keys, f.non_keys, constant->size_bits()), BudgetError);
    EXPECT_THROW(build_lbf(constant, {}, f.non_keys, 1000), InvalidArgument);
    EXPECT_THROW(build_lbf(constant, f.keys, {}, 1000), InvalidArgument);
}

TEST(Lbf, RealClassifierNoFalseNegativesWithinBudget) {
    const auto s = synthetic(0.1, 0.1, 2000, 4);
    const auto model = train_svm(s.data, {.c = 1.0});
    for (double eps : {0.05, 0.01}) {
        const auto budget = size_for_target_fpr(s.keys.size(), eps);
        const auto lbf = build_lbf(model, s.keys, s.non_keys, budget);
        expect_no_false_negatives(lbf, s.keys);
        EXPECT_LE(lbf.total_size_bits(), budget);
        EXPECT_EQ(lbf.total_size_bits(), model->size_bits() + lbf.filter_bits());
        EXPECT_EQ(lbf.info.candidates, 15u);
    }
}

TEST(Lbf, Deterministic) {
    const auto s = synthetic(0.1, 0.1, 1000, 5);
    const auto model = train_svm(s.data, {.c = 1.0});
    const auto a = build_lbf(model, s.keys, s.non_keys, 8000, {.seed = 3});
    const auto b = build_lbf(model, s.keys, s.non_keys, 8000, {.seed = 3});
    EXPECT_EQ(a.tau(), b.tau());
    EXPECT_EQ(a.backup(), b.backup());
    EXPECT_EQ(serialize_filter(a), serialize_filter(b));
}

TEST(Lbf, AcceptanceMonotoneInTau) {
    const auto s = synthetic(1.0, 0.1, 500, 6);
    const auto model = train_svm(s.data, {.c = 1.0});
    const auto taus = threshold_candidates(model->score_all(s.non_keys), 15);
    for (std::size_t i = 1; i < taus.size(); ++i) {
        const Lbf low(model, taus[i - 1], std::nullopt);
        const Lbf high(model, taus[i], std::nullopt);
        for (auto x : s.queries) {
            if (high.classifier_accepts(x)) ASSERT_TRUE(low.classifier_accepts(x));
        }
    }
}

TEST(Lbf, ShortCircuitsOnClassifierAccept) {
    auto f = flagged(50, 50, 0, 7);
    const auto lbf = build_lbf(constant, f.keys, f.non_keys, 2000);
    const Lbf eager(perfect, 0.5, lbf.backup());
    QueryTrace trace;
    EXPECT_TRUE(eager.contains(f.keys[0], &trace));
    EXPECT_EQ(trace.classifier_calls, 1u);
    EXPECT_EQ(trace.backup_probes, 0u);
    eager.contains(f.non_keys[0], &trace);
    EXPECT_EQ(trace.backup_probes, 1u);
}

TEST(Lbf, CompositionIdentity) {
    const auto s = synthetic(0.1, 0.0, 3000, 8);
    const auto model = train_svm(s.data, {.c = 1.0});
    const auto lbf = build_lbf(model, s.keys, s.non_keys, size_for_target_fpr(s.keys.size(), 0.05));
    ASSERT_TRUE(lbf.backup().has_value());
    std::size_t above = 0;
    for (auto x : s.queries) above += lbf.classifier_accepts(x);
    const double eps_tau = static_cast<double>(above) / s.queries.size();
    const double eps_f = empirical_fpr(*lbf.backup(), s.queries);
    const double predicted = lbf_fpr_compose(eps_tau, eps_f);
    const double measured = empirical_fpr(lbf, s.queries);
    EXPECT_NEAR(measured, predicted, 3 * sigma(predicted, s.queries.size()));
}

// --- SLBF ----------------------------------------------------------------------

TEST(Slbf, PerfectClassifierBeatsBloomFilter) {
    auto f = flagged(1000, 2000, 20000, 9);
    const std::uint64_t budget = size_for_target_fpr(1000, 0.05);
    const auto slbf = build_slbf(perfect, f.keys, f.non_keys, budget);
    const auto bf = BloomFilter::build(f.keys, budget, optimal_k(budget, 1000), 1);
    EXPECT_LE(empirical_fpr(slbf, f.queries), empirical_fpr(bf, f.queries));
    EXPECT_FALSE(slbf.backup().has_value());
    EXPECT_EQ(slbf.initial().m(), budget - perfect->size_bits());
    expect_no_false_negatives(slbf, f.keys);
}

TEST(Slbf, FullSplitRejectedWhenKeysWouldBeLost) {
    auto f = flagged(100, 200, 0, 10);
    EXPECT_THROW(build_slbf(constant, f.keys, f.non_keys, 5000, {.split_grid = {1.0}}), InfeasibleThreshold);
    // Without false negatives the whole remainder goes to the initial filter.
    EXPECT_NO_THROW(build_slbf(perfect, f.keys, f.non_keys, 5000, {.split_grid = {1.0}}));
}

TEST(Slbf, ZeroSplitGivesDegenerateInitialFilter) {
    auto f = flagged(100, 200, 1000, 11);
    const auto slbf = build_slbf(constant, f.keys, f.non_keys, 5000, {.split_grid = {0.0}});
    EXPECT_TRUE(slbf.initial().degenerate());
    EXPECT_FALSE(slbf.info.warnings.empty());
    expect_no_false_negatives(slbf, f.keys);
}

TEST(Slbf, ShortCircuitsOnInitialReject) {
    auto f = flagged(200, 400, 2000, 12);
    const auto slbf = build_slbf(constant, f.keys, f.non_keys, 3000);
    QueryTrace trace;
    std::size_t rejected_early = 0;
    for (auto x : f.queries) {
        const auto before = trace.classifier_calls;
        const bool initial = slbf.initial().contains(x);
        const bool answer = slbf.contains(x, &trace);
        if (!initial) {
            ++rejected_early;
            EXPECT_FALSE(answer);
            EXPECT_EQ(trace.classifier_calls, before);
        }
    }
    EXPECT_GT(rejected_early, 0u);
    EXPECT_EQ(trace.initial_probes, f.queries.size());
}

TEST(Slbf, NoFalseNegativesBudgetAndDeterminism) {
    const auto s = synthetic(1.0, 0.25, 1500, 13);
    const auto model = train_svm(s.data, {.c = 1.0});
    const auto budget = size_for_target_fpr(s.keys.size(), 0.05);
    const auto a = build_slbf(model, s.keys, s.non_keys, budget, {.seed = 4});
    const auto b = build_slbf(model, s.keys, s.non_keys, budget, {.seed = 4});
    expect_no_false_negatives(a, s.keys);
    EXPECT_LE(a.total_size_bits(), budget);
    EXPECT_EQ(serialize_filter(a), serialize_filter(b));
}

TEST(Slbf, CompositionIdentity) {
    const auto s = synthetic(0.1, 0.1, 3000, 14);
    const auto model = train_svm(s.data, {.c = 1.0});
    const auto slbf = build_slbf(model, s.keys, s.non_keys, size_for_target_fpr(s.keys.size(), 0.05));
    RowList survivors;
    for (auto x : s.queries)
        if (slbf.initial().contains(x)) survivors.push_back(x);
    ASSERT_FALSE(survivors.empty());
    const double eps_i = static_cast<double>(survivors.size()) / s.queries.size();
    std::size_t above = 0;
    for (auto x : survivors) above += slbf.classifier().score(x) > slbf.tau();
    const double eps_tau = static_cast<double>(above) / survivors.size();
    const double eps_f = slbf.backup() ? empirical_fpr(*slbf.backup(), survivors) : 0.0;
    const double predicted = eps_i * lbf_fpr_compose(eps_tau, eps_f);
    EXPECT_NEAR(empirical_fpr(slbf, s.queries), predicted, 3 * sigma(predicted, s.queries.size()));
}

// --- ADA-BF ----------------------------------------------------------------------

TEST(AdaBf, TwoGroupsPerfectClassifier) {
    auto f = flagged(500, 1000, 5000, 15);
    const auto ada = build_adabf(perfect, f.keys, f.non_keys, 8000,
                                 {.g_min = 2, .g_max = 2, .c_bar_grid = {1.0}});
    EXPECT_EQ(ada.groups(), 2u);
    EXPECT_DOUBLE_EQ(empirical_fpr(ada, f.queries), 0.0);
    expect_no_false_negatives(ada, f.keys);
}

TEST(AdaBf, ConstantClassifierActsLikeBloomFilter) {
    auto f = flagged(1000, 1000, 50000, 16);
    const std::uint64_t budget = 10000;
    const auto ada = build_adabf(constant, f.keys, f.non_keys, budget, {.seed = 5});
    EXPECT_FALSE(ada.info.warnings.empty());
    const std::uint64_t m = budget - constant->size_bits();
    const auto bf = BloomFilter::build(f.keys, m, optimal_k(m, f.keys.size()), 99);
    const double a = empirical_fpr(ada, f.queries);
    const double b = empirical_fpr(bf, f.queries);
    EXPECT_NEAR(a, b, 3 * std::sqrt(2.0) * sigma(b, f.queries.size()));
    expect_no_false_negatives(ada, f.keys);
}

TEST(AdaBf, DiscreteScoresFallBackToQuantiles) {
    const auto s = synthetic(1.0, 0.1, 1000, 17);
    const auto model = train_rf(s.data, {.trees = 10, .seed = 1});
    const auto ada = build_adabf(model, s.keys, s.non_keys, model->size_bits() + 20000, {.g_min = 15, .g_max = 15});
    EXPECT_FALSE(ada.info.warnings.empty());
    EXPECT_LE(ada.groups(), 11u);
    expect_no_false_negatives(ada, s.keys);
}

TEST(AdaBf, InvariantsOnRealClassifier) {
    const auto s = synthetic(0.1, 0.1, 2000, 18);
    const auto model = train_svm(s.data, {.c = 1.0});
    const auto budget = size_for_target_fpr(s.keys.size(), 0.01);
    const auto ada = build_adabf(model, s.keys, s.non_keys, budget);
    expect_no_false_negatives(ada, s.keys);
    EXPECT_LE(ada.total_size_bits(), budget);
    EXPECT_EQ(ada.info.candidates, 13u * 9u);
    const auto& k = ada.k_per_group();
    EXPECT_EQ(k.back(), 0u);
    for (std::size_t j = 1; j < k.size(); ++j) EXPECT_LE(k[j], k[j - 1]);
    const auto again = build_adabf(model, s.keys, s.non_keys, budget);
    EXPECT_EQ(serialize_filter(ada), serialize_filter(again));
}

TEST(AdaBf, GroupAssignmentIsStrict) {
    const AdaBf ada(constant, {0.2, 0.5}, {4, 2, 0}, BloomFilter(64, 4, 0), 3, 1.0);
    EXPECT_EQ(ada.group_of(0.0), 0u);
    EXPECT_EQ(ada.group_of(0.2), 0u);
    EXPECT_EQ(ada.group_of(0.3), 1u);
    EXPECT_EQ(ada.group_of(0.5), 1u);
    EXPECT_EQ(ada.group_of(0.51), 2u);
    EXPECT_THROW(AdaBf(constant, {0.5, 0.2}, {4, 2, 0}, BloomFilter(64, 4, 0), 3, 1.0), InvalidArgument);
    EXPECT_THROW(AdaBf(constant, {0.2, 0.5}, {4, 2, 1}, BloomFilter(64, 4, 0), 3, 1.0), InvalidArgument);
}

// --- Container ----------------------------------------------------------------------

TEST(Container, RoundTripEveryVariant) {
    const auto s = synthetic(0.1, 0.1, 800, 19);
    const auto model = train_svm(s.data, {.c = 1.0});
    const auto budget = size_for_target_fpr(s.keys.size(), 0.05);
    std::vector<AnyFilter> filters{
        BloomFilter::build(s.keys, budget, optimal_k(budget, s.keys.size()), 1),
        build_lbf(model, s.keys, s.non_keys, budget),
        build_slbf(model, s.keys, s.non_keys, budget),
        build_adabf(model, s.keys, s.non_keys, budget),
    };
    for (const auto& f : filters) {
        const auto bytes = serialize_filter(f);
        const auto back = deserialize_filter(bytes);
        EXPECT_EQ(variant_of(back), variant_of(f));
        EXPECT_EQ(serialize_filter(back), bytes);
        EXPECT_EQ(filter_total_bits(back), filter_total_bits(f));
        for (auto x : s.queries) ASSERT_EQ(filter_contains(back, x), filter_contains(f, x));
        for (auto x : s.keys) ASSERT_TRUE(filter_contains(back, x));
    }
    auto bytes = serialize_filter(filters[1]);
    bytes.push_back(0);
    EXPECT_THROW(deserialize_filter(bytes), ParseError);
    EXPECT_EQ(parse_filter_variant("slbf"), FilterVariant::slbf);
    EXPECT_THROW(parse_filter_variant("vaidya"), InvalidArgument);
}

// --- Timing ---------------------------------------------------------------------------

TEST(Timing, PercentVsBaseline) {
    EXPECT_DOUBLE_EQ(percent_vs_baseline(2e-7, 1e-7), 100.0);
    EXPECT_DOUBLE_EQ(percent_vs_baseline(5e-8, 1e-7), -50.0);
    EXPECT_DOUBLE_EQ(percent_vs_baseline(1e-7, 1e-7), 0.0);
    EXPECT_THROW(percent_vs_baseline(1.0, 0.0), InvalidArgument);
}

TEST(Timing, StableAcrossRuns) {
    auto f = flagged(2000, 10, 20000, 20);
    const auto bf = BloomFilter::build(f.keys, 20000, 7, 1);
    auto query = [&](FeatureView x) { return bf.contains(x); };
    const double a = reject_time(query, f.queries);
    const double b = reject_time(query, f.queries);
    EXPECT_GT(a, 0.0);
    EXPECT_LT(std::abs(a - b) / std::min(a, b), 0.5);
    EXPECT_THROW(reject_time(query, RowList{}), InvalidArgument);
    EXPECT_THROW(reject_time(query, f.queries, {.repeats = 2}), InvalidArgument);
}
