#include "lbf/experiment.hpp"

#include <sys/utsname.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lbf/bloom.hpp"
#include "lbf/error.hpp"
#include "lbf/metrics.hpp"
#include "lbf/random.hpp"

namespace lbf {

namespace {

// Stream ids for mix_seed; every consumer of the experiment seed gets its own.
constexpr std::uint64_t kSplitStream = 10;
constexpr std::uint64_t kTrainStream = 11;
constexpr std::uint64_t kBaselineStream = 12;
constexpr std::uint64_t kDnaStream = 13;
constexpr std::uint64_t kVariantStream = 20;

std::string fmt(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string kind_name(DatasetSource::Kind k) {
    switch (k) {
        case DatasetSource::Kind::synthetic: return "synthetic";
        case DatasetSource::Kind::csv: return "csv";
        case DatasetSource::Kind::url: return "url";
        case DatasetSource::Kind::dna: return "dna";
    }
    return "?";
}

DatasetSource::Kind parse_kind(const std::string& s) {
    if (s == "synthetic") return DatasetSource::Kind::synthetic;
    if (s == "csv") return DatasetSource::Kind::csv;
    if (s == "url") return DatasetSource::Kind::url;
    if (s == "dna") return DatasetSource::Kind::dna;
    throw InvalidArgument("unknown dataset kind '" + s + "' (expected synthetic, csv, url or dna)");
}

}  // namespace

// --- Dataset source ----------------------------------------------------------

LabeledDataset DatasetSource::load(std::uint64_t seed) const {
    switch (kind) {
        case Kind::synthetic: return generate(synthetic);
        case Kind::csv: return load_csv(path);
        case Kind::url: return load_url_csv(path);
        case Kind::dna: {
            auto keys = load_kmer_file(path, kmer_length);
            std::sort(keys.begin(), keys.end());
            keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
            const auto n = static_cast<std::size_t>(std::llround(dna_negative_ratio * static_cast<double>(keys.size())));
            const auto negatives = sample_negative_kmers(n, kmer_length, keys, mix_seed(seed, kDnaStream));
            auto data = kmer_dataset(keys, negatives, kmer_length);
            auto p = data.provenance();
            p.source = path;
            data.set_provenance(p);
            return data;
        }
    }
    throw InvalidArgument("unknown dataset kind");
}

std::string DatasetSource::describe() const {
    if (kind == Kind::synthetic) {
        const auto& s = synthetic;
        return "synthetic:a=" + fmt(s.a) + ";r=" + fmt(s.r) + ";rho=" + fmt(s.rho) + ";n1=" + std::to_string(s.n1) +
               ";seed=" + std::to_string(s.seed);
    }
    return kind_name(kind) + ":" + std::filesystem::path(path).filename().string();
}

// --- Config -------------------------------------------------------------------

void ExperimentConfig::validate() const {
    if (epsilons.empty()) throw InvalidArgument(name + ": empty epsilon list");
    for (double e : epsilons) {
        if (!(e > 0 && e < 1)) throw InvalidArgument(name + ": every epsilon must lie in (0, 1)");
    }
    if (!(train_non_key_fraction > 0 && train_non_key_fraction < 1)) {
        throw InvalidArgument(name + ": train_non_key_fraction must lie in (0, 1)");
    }
    if (tau_grid_size == 0) throw InvalidArgument(name + ": tau grid must be non-empty");
    if (g_min < 2 || g_max < g_min) throw InvalidArgument(name + ": need 2 <= g_min <= g_max");
    if (c_bar_grid.empty() || split_grid.empty()) throw InvalidArgument(name + ": empty c_bar or split grid");
    if (dataset.kind == DatasetSource::Kind::synthetic) dataset.synthetic.validate();
    else if (dataset.path.empty()) throw InvalidArgument(name + ": dataset path required");
}

void to_json(nlohmann::json& j, const ExperimentConfig& cfg) {
    nlohmann::json ds{{"kind", kind_name(cfg.dataset.kind)}};
    if (cfg.dataset.kind == DatasetSource::Kind::synthetic) {
        const auto& s = cfg.dataset.synthetic;
        ds.update({{"a", s.a}, {"r", s.r}, {"rho", s.rho}, {"n1", s.n1}, {"q", s.q}, {"gamma", s.gamma},
                   {"seed", s.seed}});
    } else {
        ds["path"] = cfg.dataset.path;
        if (cfg.dataset.kind == DatasetSource::Kind::dna) {
            ds["k"] = cfg.dataset.kmer_length;
            ds["negative_ratio"] = cfg.dataset.dna_negative_ratio;
        }
    }
    const auto& c = cfg.classifier;
    nlohmann::json cl{{"kind", to_string(c.kind)}, {"cost_sensitive", c.cost_sensitive}};
    switch (c.kind) {
        case ClassifierKind::svm: cl.update({{"c", c.c}, {"epochs", c.svm_epochs}}); break;
        case ClassifierKind::nn: cl.update({{"hidden", c.hidden}, {"lr", c.lr}, {"epochs", c.nn_epochs}}); break;
        case ClassifierKind::rf: cl.update({{"trees", c.trees}, {"delta", c.min_leaf}}); break;
    }
    std::vector<std::string> variants;
    for (auto v : cfg.variants) variants.push_back(to_string(v));
    j = {{"name", cfg.name},
         {"dataset", ds},
         {"classifier", cl},
         {"variants", variants},
         {"epsilons", cfg.epsilons},
         {"seed", cfg.seed},
         {"train_non_key_fraction", cfg.train_non_key_fraction},
         {"tau_grid_size", cfg.tau_grid_size},
         {"split_grid", cfg.split_grid},
         {"g_range", {cfg.g_min, cfg.g_max}},
         {"c_bar_grid", cfg.c_bar_grid},
         {"timing", {{"enabled", cfg.measure_time}, {"repeats", cfg.timing.repeats}, {"batch", cfg.timing.min_batch}}}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& cfg) {
    cfg = ExperimentConfig{};
    cfg.name = j.value("name", cfg.name);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("dataset")) {
        const auto& ds = j.at("dataset");
        cfg.dataset.kind = parse_kind(ds.value("kind", std::string("synthetic")));
        auto& s = cfg.dataset.synthetic;
        s.a = ds.value("a", s.a);
        s.r = ds.value("r", s.r);
        s.rho = ds.value("rho", s.rho);
        s.n1 = ds.value("n1", s.n1);
        s.q = ds.value("q", s.q);
        s.gamma = ds.value("gamma", s.gamma);
        s.seed = ds.value("seed", cfg.seed);
        cfg.dataset.path = ds.value("path", std::string());
        cfg.dataset.kmer_length = ds.value("k", cfg.dataset.kmer_length);
        cfg.dataset.dna_negative_ratio = ds.value("negative_ratio", cfg.dataset.dna_negative_ratio);
    } else {
        cfg.dataset.synthetic.seed = cfg.seed;
    }
    if (j.contains("classifier")) {
        const auto& cl = j.at("classifier");
        auto& c = cfg.classifier;
        c.kind = parse_classifier_kind(cl.value("kind", std::string("svm")));
        c.cost_sensitive = cl.value("cost_sensitive", c.cost_sensitive);
        c.c = cl.value("c", c.c);
        c.lr = cl.value("lr", c.lr);
        c.hidden = cl.value("hidden", c.hidden);
        c.trees = cl.value("trees", c.trees);
        c.min_leaf = cl.value("delta", c.min_leaf);
        if (c.kind == ClassifierKind::svm) c.svm_epochs = cl.value("epochs", c.svm_epochs);
        if (c.kind == ClassifierKind::nn) c.nn_epochs = cl.value("epochs", c.nn_epochs);
    }
    if (j.contains("variants")) {
        cfg.variants.clear();
        for (const auto& v : j.at("variants")) cfg.variants.push_back(parse_filter_variant(v.get<std::string>()));
    }
    cfg.epsilons = j.value("epsilons", cfg.epsilons);
    cfg.train_non_key_fraction = j.value("train_non_key_fraction", cfg.train_non_key_fraction);
    cfg.tau_grid_size = j.value("tau_grid_size", cfg.tau_grid_size);
    cfg.split_grid = j.value("split_grid", cfg.split_grid);
    if (j.contains("g_range")) {
        const auto g = j.at("g_range").get<std::vector<std::size_t>>();
        if (g.size() != 2) throw InvalidArgument("g_range must be [min, max]");
        cfg.g_min = g[0];
        cfg.g_max = g[1];
    }
    cfg.c_bar_grid = j.value("c_bar_grid", cfg.c_bar_grid);
    if (j.contains("timing")) {
        const auto& t = j.at("timing");
        cfg.measure_time = t.value("enabled", cfg.measure_time);
        cfg.timing.repeats = t.value("repeats", cfg.timing.repeats);
        cfg.timing.min_batch = t.value("batch", cfg.timing.min_batch);
    }
    cfg.validate();
}

// --- Split ----------------------------------------------------------------------

DataSplit split_data(const LabeledDataset& data, std::uint64_t seed, double train_non_key_fraction) {
    if (!(train_non_key_fraction > 0 && train_non_key_fraction < 1)) {
        throw InvalidArgument("split_data: fraction must lie in (0, 1)");
    }
    auto keys = data.indices_with_label(1);
    auto non_keys = data.indices_with_label(0);
    if (keys.empty()) throw InvalidArgument("split_data: no keys");
    if (non_keys.size() < 10) throw InvalidArgument("split_data: need at least 10 non-keys");

    Rng rng(seed);
    std::shuffle(non_keys.begin(), non_keys.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_non_key_fraction * static_cast<double>(non_keys.size())));
    std::vector<std::size_t> train = keys;
    train.insert(train.end(), non_keys.begin(), non_keys.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(train.begin(), train.end());
    std::vector<std::size_t> query(non_keys.begin() + static_cast<std::ptrdiff_t>(n_train), non_keys.end());
    std::sort(query.begin(), query.end());
    return {data.subset(train), data.subset(query)};
}

// --- Run ------------------------------------------------------------------------

namespace {

AnyFilter build_variant(FilterVariant v, const ExperimentConfig& cfg, const ClassifierPtr& classifier,
                        const RowList& keys, const RowList& train_non_keys, std::uint64_t budget) {
    const std::uint64_t seed = mix_seed(cfg.seed, kVariantStream + static_cast<std::uint64_t>(v));
    switch (v) {
        case FilterVariant::bf:
            return BloomFilter::build(keys, budget, optimal_k(budget, keys.size()), seed);
        case FilterVariant::lbf:
            return build_lbf(classifier, keys, train_non_keys, budget, {cfg.tau_grid_size, seed});
        case FilterVariant::slbf:
            return build_slbf(classifier, keys, train_non_keys, budget, {cfg.tau_grid_size, cfg.split_grid, seed});
        case FilterVariant::adabf:
            return build_adabf(classifier, keys, train_non_keys, budget, {cfg.g_min, cfg.g_max, cfg.c_bar_grid, seed});
    }
    throw InvalidArgument("unknown filter variant");
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto data = cfg.dataset.load(cfg.seed);
    const auto split = split_data(data, mix_seed(cfg.seed, kSplitStream), cfg.train_non_key_fraction);
    const auto keys = rows_with_label(split.train, 1);
    const auto train_non_keys = rows_with_label(split.train, 0);
    const auto queries = all_rows(split.query);

    ExperimentReport report;
    const auto classifier = train_classifier(split.train, cfg.classifier, mix_seed(cfg.seed, kTrainStream));
    {
        std::vector<double> scores = classifier->score_all(keys);
        const auto query_scores = classifier->score_all(queries);
        std::vector<std::uint8_t> labels(scores.size(), 1);
        scores.insert(scores.end(), query_scores.begin(), query_scores.end());
        labels.resize(scores.size(), 0);
        report.classifier_auc = auc(scores, labels);
    }

    const std::string dataset = cfg.dataset.describe();
    for (double eps : cfg.epsilons) {
        const std::uint64_t budget = size_for_target_fpr(keys.size(), eps);
        const auto baseline =
            BloomFilter::build(keys, budget, optimal_k(budget, keys.size()), mix_seed(cfg.seed, kBaselineStream));
        std::optional<double> baseline_time;
        if (cfg.measure_time) {
            baseline_time = reject_time([&](FeatureView x) { return baseline.contains(x); }, queries, cfg.timing);
        }

        auto emit = [&](const std::string& variant, const ClassifierPtr& model, const AnyFilter* filter) {
            ExperimentRow row;
            row.config = cfg.name;
            row.dataset = dataset;
            row.classifier = model ? model->name() : "-";
            row.variant = variant;
            row.epsilon = eps;
            row.budget_bits = budget;
            row.classifier_bits = model ? model->size_bits() : 0;
            row.seed = cfg.seed;
            if (!filter) {
                row.status = "infeasible";
                report.rows.push_back(std::move(row));
                return;
            }
            row.total_bits = filter_total_bits(*filter);
            row.filter_bits = row.total_bits - row.classifier_bits;
            row.queries = queries.size();
            row.fpr = empirical_fpr(*filter, queries);
            if (const auto* info = build_info(*filter)) row.train_fpr = info->train_fpr;
            for (auto k : keys) row.false_negatives += !filter_contains(*filter, k);
            row.hyperparameters = describe_filter(*filter);
            if (const auto* info = build_info(*filter)) {
                for (const auto& w : info->warnings) {
                    report.warnings.push_back(cfg.name + " " + variant + " eps=" + fmt(eps) + ": " + w);
                }
            }
            if (baseline_time) {
                const double t = variant == "bf" ? *baseline_time
                                                 : reject_time([&](FeatureView x) { return filter_contains(*filter, x); },
                                                               queries, cfg.timing);
                row.reject_ns = t * 1e9;
                row.reject_pct = percent_vs_baseline(t, *baseline_time);
            }
            report.rows.push_back(std::move(row));
        };

        const AnyFilter baseline_any = baseline;
        emit("bf", nullptr, &baseline_any);
        for (auto v : cfg.variants) {
            if (v == FilterVariant::bf) continue;
            if (classifier->size_bits() >= budget) {
                emit(to_string(v), classifier, nullptr);
                continue;
            }
            std::optional<AnyFilter> filter;
            try {
                filter = build_variant(v, cfg, classifier, keys, train_non_keys, budget);
            } catch (const InfeasibleThreshold& e) {
                report.warnings.push_back(cfg.name + " " + to_string(v) + " eps=" + fmt(eps) + ": " + e.what());
            }
            emit(to_string(v), classifier, filter ? &*filter : nullptr);
        }
    }
    return report;
}

// --- CSV / sweep ------------------------------------------------------------------

const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> columns{
        "config",      "dataset",    "classifier", "variant",         "epsilon",         "budget_bits",
        "classifier_bits", "filter_bits", "total_bits", "status",     "fpr",             "train_fpr",
        "queries",     "false_negatives", "hyperparameters", "seed",  "reject_ns",       "reject_pct"};
    return columns;
}

std::string csv_header() {
    std::string out;
    for (const auto& c : report_columns()) out += (out.empty() ? "" : ",") + c;
    return out;
}

std::string csv_line(const ExperimentRow& r) {
    const bool ok = r.status == "ok";
    std::vector<std::string> f{csv_field(r.config),
                               csv_field(r.dataset),
                               csv_field(r.classifier),
                               r.variant,
                               fmt(r.epsilon),
                               std::to_string(r.budget_bits),
                               std::to_string(r.classifier_bits),
                               ok ? std::to_string(r.filter_bits) : "",
                               ok ? std::to_string(r.total_bits) : "",
                               r.status,
                               ok ? fmt(r.fpr) : "",
                               ok ? fmt(r.train_fpr) : "",
                               ok ? std::to_string(r.queries) : "",
                               ok ? std::to_string(r.false_negatives) : "",
                               csv_field(r.hyperparameters),
                               std::to_string(r.seed),
                               r.reject_ns ? fmt(*r.reject_ns) : "",
                               r.reject_pct ? fmt(*r.reject_pct) : ""};
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + f[i];
    return out;
}

namespace {

std::string machine_description() {
    utsname u{};
    if (uname(&u) != 0) return "unknown";
    return std::string(u.sysname) + " " + u.release + " " + u.machine + " (" + u.nodename + ")";
}

}  // namespace

void sweep(const std::vector<ExperimentConfig>& configs, const std::string& csv_path) {
    if (configs.empty()) throw InvalidArgument("sweep: no configurations");
    for (const auto& c : configs) c.validate();

    std::ofstream csv(csv_path, std::ios::trunc);
    if (!csv) throw InvalidArgument("sweep: cannot open '" + csv_path + "' for writing");
    csv << csv_header() << '\n' << std::flush;

    const auto sidecar_path = std::filesystem::path(csv_path).replace_extension(".json").string();
    nlohmann::json sidecar{{"schema_version", kReportSchemaVersion},
                           {"columns", report_columns()},
                           {"timing_columns", kTimingColumns},
                           {"machine", machine_description()},
                           {"compiler", __VERSION__},
                           {"timing_protocol", "steady_clock; warm-up pass excluded; median of repeats; "
                                               "reject_pct relative to a baseline Bloom filter of the same budget "
                                               "measured in the same process"},
                           {"experiments", nlohmann::json::array()}};
    auto write_sidecar = [&] {
        std::ofstream out(sidecar_path, std::ios::trunc);
        if (!out) throw InvalidArgument("sweep: cannot open '" + sidecar_path + "' for writing");
        out << sidecar.dump(2) << '\n';
    };

    for (const auto& cfg : configs) {
        const auto report = run_experiment(cfg);
        for (const auto& row : report.rows) csv << csv_line(row) << '\n';
        csv << std::flush;
        if (!csv) throw InvalidArgument("sweep: failed writing '" + csv_path + "'");
        sidecar["experiments"].push_back({{"config", cfg},
                                          {"rows", report.rows.size()},
                                          {"classifier_auc", report.classifier_auc},
                                          {"warnings", report.warnings}});
        write_sidecar();
    }
}

std::vector<ExperimentConfig> load_sweep_configs(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    std::vector<ExperimentConfig> out;
    try {
        if (j.contains("experiments")) {
            for (const auto& e : j.at("experiments")) out.push_back(e.get<ExperimentConfig>());
        } else {
            out.push_back(j.get<ExperimentConfig>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (out.empty()) throw InvalidArgument(path + ": no experiments");
    return out;
}

}  // namespace lbf
