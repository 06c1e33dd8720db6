#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "lbf/bloom.hpp"
#include "lbf/byte_io.hpp"
#include "lbf/complexity.hpp"
#include "lbf/cross_validation.hpp"
#include "lbf/datagen.hpp"
#include "lbf/error.hpp"
#include "lbf/experiment.hpp"
#include "lbf/learned_filters.hpp"
#include "lbf/metrics.hpp"
#include "lbf/timing.hpp"
#include "lbf/training.hpp"

using nlohmann::json;
using namespace lbf;

namespace {

struct DataArgs {
    std::string path;
    std::string format = "csv";
    std::size_t kmer_length = 14;

    void add(CLI::App* cmd) {
        cmd->add_option("dataset", path, "Dataset file")->required();
        cmd->add_option("--format", format, "csv, url (17 features) or dna (one k-mer per line)")
            ->check(CLI::IsMember({"csv", "url", "dna"}));
        cmd->add_option("--kmer", kmer_length, "k-mer length for --format dna");
    }

    LabeledDataset load(std::uint64_t seed) const {
        DatasetSource src;
        src.kind = format == "url" ? DatasetSource::Kind::url
                   : format == "dna" ? DatasetSource::Kind::dna
                                     : DatasetSource::Kind::csv;
        src.path = path;
        src.kmer_length = kmer_length;
        return src.load(seed);
    }
};

struct ClassifierArgs {
    std::string kind = "svm";
    std::vector<std::size_t> hidden{25};
    std::size_t trees = 10;
    bool cost_sensitive = false;
    double c = 1.0;
    double lr = 1e-3;
    std::size_t delta = 1;
    std::size_t epochs = 0;

    void add(CLI::App* cmd, bool with_non_key) {
        cmd->add_option("--classifier", kind, "svm, nn or rf")->check(CLI::IsMember({"svm", "nn", "rf"}));
        cmd->add_option("--hidden", hidden, "NN hidden-layer widths")->delimiter(',');
        cmd->add_option("--trees", trees, "RF tree count");
        cmd->add_flag("--cost-sensitive", cost_sensitive, "Cost-sensitive SVM/NN, balanced RF bootstrap");
        cmd->add_option("--epochs", epochs, "Training epochs (SVM/NN)");
        if (with_non_key) {
            cmd->add_option("--c", c, "SVM regularization");
            cmd->add_option("--lr", lr, "NN learning rate");
            cmd->add_option("--delta", delta, "RF minimum leaf size");
        }
    }

    ClassifierSpec spec() const {
        ClassifierSpec s;
        s.kind = parse_classifier_kind(kind);
        s.hidden = hidden;
        s.trees = trees;
        s.cost_sensitive = cost_sensitive;
        s.c = c;
        s.lr = lr;
        s.min_leaf = delta;
        if (epochs > 0) s.nn_epochs = s.svm_epochs = epochs;
        return s;
    }
};

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Classic and learned Bloom filters: data generation, training, filter construction and sweeps"};
    app.require_subcommand(1);

    // gen-data
    SynthConfig synth;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen-data", "Generate a synthetic parabola dataset as CSV");
    gen->add_option("--a", synth.a, "Boundary curvature");
    gen->add_option("--r", synth.r, "Label-noise fraction");
    gen->add_option("--rho", synth.rho, "Negatives per positive");
    gen->add_option("--n1", synth.n1, "Positive count");
    gen->add_option("--q", synth.q, "Dimension");
    gen->add_option("--gamma", synth.gamma, "Variance scale");
    gen->add_option("--seed", synth.seed, "Random seed");
    gen->add_option("--out", gen_out, "Output CSV")->required();

    // complexity
    DataArgs cx_data;
    std::uint64_t cx_seed = 0;
    auto* cx = app.add_subcommand("complexity", "Print F1v and C2 of a dataset as JSON");
    cx_data.add(cx);
    cx->add_option("--seed", cx_seed, "Seed for sampled DNA negatives");

    // cv
    DataArgs cv_data;
    ClassifierArgs cv_cls;
    CvPlan plan;
    auto* cv = app.add_subcommand("cv", "Nested stratified cross-validation (AUC / AUPRC)");
    cv_data.add(cv);
    cv_cls.add(cv, false);
    cv->add_option("--seed", plan.seed, "Fold seed");
    cv->add_option("--outer", plan.outer_folds, "Outer folds");
    cv->add_option("--inner", plan.inner_folds, "Inner folds");

    // train
    DataArgs tr_data;
    ClassifierArgs tr_cls;
    std::uint64_t tr_seed = 0;
    std::string tr_out;
    auto* tr = app.add_subcommand("train", "Train a classifier on all keys and the training share of non-keys");
    tr_data.add(tr);
    tr_cls.add(tr, true);
    tr->add_option("--seed", tr_seed, "Split and training seed");
    tr->add_option("--out", tr_out, "Output model file")->required();

    // build-filter
    DataArgs bf_data;
    std::string bf_variant = "lbf";
    std::string bf_model;
    double bf_eps = 0.05;
    std::uint64_t bf_budget = 0;
    std::uint64_t bf_seed = 0;
    std::string bf_out;
    LbfOptions lbf_opt;
    auto* bf = app.add_subcommand("build-filter", "Build a classic or learned filter under a space budget");
    bf_data.add(bf);
    bf->add_option("--variant", bf_variant, "bf, lbf, slbf or adabf")
        ->check(CLI::IsMember({"bf", "lbf", "slbf", "adabf"}));
    bf->add_option("--model", bf_model, "Classifier file (learned variants)");
    bf->add_option("--epsilon", bf_eps, "Reference FPR defining the budget");
    bf->add_option("--budget", bf_budget, "Budget in bits (overrides --epsilon)");
    bf->add_option("--tau-count", lbf_opt.tau_grid_size, "Threshold candidates");
    bf->add_option("--seed", bf_seed, "Split and hashing seed");
    bf->add_option("--out", bf_out, "Output filter file")->required();

    // evaluate
    DataArgs ev_data;
    std::string ev_filter;
    std::uint64_t ev_seed = 0;
    bool ev_timing = false;
    auto* ev = app.add_subcommand("evaluate", "Measure FPR and reject time of a filter on held-out non-keys");
    ev->add_option("filter", ev_filter, "Filter file")->required();
    ev_data.add(ev);
    ev->add_option("--seed", ev_seed, "Split seed used when building");
    ev->add_flag("--timing", ev_timing, "Also measure reject time against a classic filter of equal size");

    // sweep
    std::string sw_config;
    std::string sw_out;
    auto* sw = app.add_subcommand("sweep", "Run experiments from a JSON config; write CSV plus JSON sidecar");
    sw->add_option("--config", sw_config, "Experiment config (object or {\"experiments\": [...]})")->required();
    sw->add_option("--out", sw_out, "Output CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            const auto data = generate(synth);
            save_csv(data, gen_out);
            print({{"out", gen_out}, {"rows", data.size()}, {"positives", data.count_positive()},
                   {"negatives", data.count_negative()}});
        } else if (*cx) {
            const auto r = measure_complexity(cx_data.load(cx_seed));
            print({{"f1v", r.f1v}, {"c2", r.c2}, {"n1", r.n1}, {"n2", r.n2}});
        } else if (*cv) {
            const auto report = nested_cv(cv_data.load(plan.seed), cv_cls.spec(), plan);
            json folds = json::array();
            for (const auto& f : report.folds) {
                folds.push_back({{"auc", f.auc}, {"auprc", f.auprc}, {report.hyperparameter, f.chosen},
                                 {"inner_mean_auc", f.inner_mean_auc}});
            }
            print({{"classifier", report.classifier}, {"hyperparameter", report.hyperparameter},
                   {"grid", report.grid}, {"folds", folds}, {"mean_auc", report.mean_auc},
                   {"mean_auprc", report.mean_auprc}});
        } else if (*tr) {
            const auto split = split_data(tr_data.load(tr_seed), tr_seed);
            const auto model = train_classifier(split.train, tr_cls.spec(), tr_seed);
            write_file_bytes(tr_out, model->encode());
            print({{"classifier", model->name()}, {"size_bits", model->size_bits()},
                   {"train_auc", auc(model->score_all(split.train), split.train.labels())}, {"out", tr_out}});
        } else if (*bf) {
            const auto split = split_data(bf_data.load(bf_seed), bf_seed);
            const auto keys = rows_with_label(split.train, 1);
            const auto non_keys = rows_with_label(split.train, 0);
            const std::uint64_t budget = bf_budget ? bf_budget : size_for_target_fpr(keys.size(), bf_eps);
            const auto variant = parse_filter_variant(bf_variant);
            ClassifierPtr model;
            if (variant != FilterVariant::bf) {
                if (bf_model.empty()) throw InvalidArgument("--model is required for learned variants");
                model = decode_classifier(read_file_bytes(bf_model));
            }
            lbf_opt.seed = bf_seed;
            AnyFilter filter;
            switch (variant) {
                case FilterVariant::bf:
                    filter = BloomFilter::build(keys, budget, optimal_k(budget, keys.size()), bf_seed);
                    break;
                case FilterVariant::lbf: filter = build_lbf(model, keys, non_keys, budget, lbf_opt); break;
                case FilterVariant::slbf:
                    filter = build_slbf(model, keys, non_keys, budget, {.tau_grid_size = lbf_opt.tau_grid_size,
                                                                        .seed = bf_seed});
                    break;
                case FilterVariant::adabf:
                    filter = build_adabf(model, keys, non_keys, budget, {.seed = bf_seed});
                    break;
            }
            write_file_bytes(bf_out, serialize_filter(filter));
            json out{{"variant", bf_variant},     {"budget_bits", budget},
                     {"total_bits", filter_total_bits(filter)}, {"configuration", describe_filter(filter)},
                     {"keys", keys.size()},       {"out", bf_out}};
            if (const auto* info = build_info(filter)) {
                out["train_fpr"] = info->train_fpr;
                out["warnings"] = info->warnings;
            }
            print(out);
        } else if (*ev) {
            const auto filter = deserialize_filter(read_file_bytes(ev_filter));
            const auto split = split_data(ev_data.load(ev_seed), ev_seed);
            const auto keys = rows_with_label(split.train, 1);
            const auto queries = all_rows(split.query);
            std::size_t false_negatives = 0;
            for (auto k : keys) false_negatives += !filter_contains(filter, k);
            json out{{"variant", to_string(variant_of(filter))},
                     {"total_bits", filter_total_bits(filter)},
                     {"fpr", empirical_fpr(filter, queries)},
                     {"queries", queries.size()},
                     {"false_negatives", false_negatives}};
            if (ev_timing) {
                const auto bits = filter_total_bits(filter);
                const auto baseline = BloomFilter::build(keys, bits, optimal_k(bits, keys.size()), ev_seed);
                const double base = reject_time([&](FeatureView x) { return baseline.contains(x); }, queries);
                const double t = reject_time([&](FeatureView x) { return filter_contains(filter, x); }, queries);
                out["reject_ns"] = t * 1e9;
                out["baseline_reject_ns"] = base * 1e9;
                out["reject_pct"] = percent_vs_baseline(t, base);
            }
            print(out);
        } else if (*sw) {
            sweep(load_sweep_configs(sw_config), sw_out);
            print({{"csv", sw_out}});
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
