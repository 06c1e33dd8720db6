#include "lbf/learned_filters.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lbf/byte_io.hpp"
#include "lbf/error.hpp"
#include "lbf/random.hpp"

namespace lbf {

// --- FPR composition -------------------------------------------------------

double lbf_fpr_compose(double eps_tau, double eps_f) {
    if (!(eps_tau >= 0 && eps_tau <= 1 && eps_f >= 0 && eps_f <= 1)) {
        throw InvalidArgument("lbf_fpr_compose: rates must lie in [0, 1]");
    }
    return eps_tau + (1.0 - eps_tau) * eps_f;
}

double backup_fpr_for_target(double eps, double eps_tau) {
    if (!(eps > 0 && eps < 1) || !(eps_tau >= 0)) {
        throw InvalidArgument("backup_fpr_for_target: need eps in (0, 1) and eps_tau >= 0");
    }
    if (eps_tau >= eps) throw InfeasibleThreshold("backup_fpr_for_target: classifier rate must be below the target");
    return (eps - eps_tau) / (1.0 - eps_tau);
}

double slbf_initial_fpr(double eps, double eps_tau, double fn_frac) {
    if (!(eps > 0 && eps < 1) || !(fn_frac >= 0 && fn_frac < 1) || !(eps_tau > 0)) {
        throw InvalidArgument("slbf_initial_fpr: need eps in (0, 1), eps_tau > 0, fn_frac in [0, 1)");
    }
    const double kept = 1.0 - fn_frac;
    // Relative slack so the documented boundary cases survive rounding.
    const double slack = 1e-12;
    if (eps_tau < eps * kept * (1 - slack) || eps_tau > kept * (1 + slack)) {
        throw InfeasibleThreshold("slbf_initial_fpr: need eps (1 - FN/n) <= eps_tau <= 1 - FN/n");
    }
    return std::min(1.0, eps / eps_tau * kept);
}

// --- Filters ---------------------------------------------------------------

Lbf::Lbf(ClassifierPtr classifier, double tau, std::optional<BloomFilter> backup)
    : classifier_(std::move(classifier)), tau_(tau), backup_(std::move(backup)) {
    if (!classifier_) throw InvalidArgument("Lbf: null classifier");
}

bool Lbf::contains(FeatureView x, QueryTrace* trace) const {
    if (trace) ++trace->classifier_calls;
    if (classifier_->score(x) > tau_) return true;
    if (!backup_) return false;
    if (trace) ++trace->backup_probes;
    return backup_->contains(x);
}

Slbf::Slbf(BloomFilter initial, ClassifierPtr classifier, double tau, std::optional<BloomFilter> backup, double split)
    : initial_(std::move(initial)), classifier_(std::move(classifier)), tau_(tau), backup_(std::move(backup)),
      split_(split) {
    if (!classifier_) throw InvalidArgument("Slbf: null classifier");
}

bool Slbf::contains(FeatureView x, QueryTrace* trace) const {
    if (trace) ++trace->initial_probes;
    if (!initial_.contains(x)) return false;
    if (trace) ++trace->classifier_calls;
    if (classifier_->score(x) > tau_) return true;
    if (!backup_) return false;
    if (trace) ++trace->backup_probes;
    return backup_->contains(x);
}

AdaBf::AdaBf(ClassifierPtr classifier, std::vector<double> boundaries, std::vector<unsigned> k_per_group,
             BloomFilter bits, std::size_t groups_requested, double c_bar)
    : classifier_(std::move(classifier)), boundaries_(std::move(boundaries)), k_per_group_(std::move(k_per_group)),
      bits_(std::move(bits)), groups_requested_(groups_requested), c_bar_(c_bar) {
    if (!classifier_) throw InvalidArgument("AdaBf: null classifier");
    if (k_per_group_.size() != boundaries_.size() + 1) throw InvalidArgument("AdaBf: need one probe count per group");
    if (!std::is_sorted(boundaries_.begin(), boundaries_.end()) ||
        std::adjacent_find(boundaries_.begin(), boundaries_.end()) != boundaries_.end()) {
        throw InvalidArgument("AdaBf: boundaries must be strictly increasing");
    }
    if (!std::is_sorted(k_per_group_.rbegin(), k_per_group_.rend())) {
        throw InvalidArgument("AdaBf: probe counts must be non-increasing");
    }
    if (k_per_group_.size() > 1 && k_per_group_.back() != 0) {
        throw InvalidArgument("AdaBf: top group must accept unconditionally");
    }
    if (k_per_group_.front() > bits_.k()) throw InvalidArgument("AdaBf: probe count exceeds bit-array hash count");
}

std::size_t AdaBf::group_of(double score) const {
    return static_cast<std::size_t>(std::lower_bound(boundaries_.begin(), boundaries_.end(), score) -
                                    boundaries_.begin());
}

bool AdaBf::contains(FeatureView x, QueryTrace* trace) const {
    if (trace) ++trace->classifier_calls;
    const unsigned probes = k_per_group_[group_of(classifier_->score(x))];
    if (probes == 0) return true;
    if (trace) ++trace->backup_probes;
    return bits_.contains_hash(bits_.hash(x), probes);
}

// --- Construction helpers ----------------------------------------------------

namespace {

constexpr std::uint64_t kBackupStream = 1;
constexpr std::uint64_t kInitialStream = 2;
constexpr std::uint64_t kAdaStream = 3;

std::uint64_t remaining_budget(const Classifier& classifier, std::uint64_t budget_bits) {
    const auto size = classifier.size_bits();
    if (size >= budget_bits) {
        throw BudgetError("classifier " + classifier.name() + " needs " + std::to_string(size) +
                          " bits, budget is " + std::to_string(budget_bits));
    }
    return budget_bits - size;
}

std::vector<Hash128> hash_rows(const RowList& rows, std::uint64_t seed) {
    std::vector<Hash128> out;
    out.reserve(rows.size());
    for (auto r : rows) out.push_back(hash_features(r, seed));
    return out;
}

void require_inputs(const ClassifierPtr& classifier, const RowList& keys, const RowList& non_keys, const char* who) {
    if (!classifier) throw InvalidArgument(std::string(who) + ": null classifier");
    if (keys.empty()) throw InvalidArgument(std::string(who) + ": empty key set");
    if (non_keys.empty()) throw InvalidArgument(std::string(who) + ": empty training non-key set");
}

// Backup over the keys scoring <= tau, or nothing when there are none.
std::optional<BloomFilter> make_backup(const std::vector<double>& key_scores, const std::vector<Hash128>& key_hashes,
                                       double tau, std::uint64_t m, std::uint64_t seed) {
    std::size_t false_negatives = 0;
    for (double s : key_scores) false_negatives += (s <= tau);
    if (false_negatives == 0) return std::nullopt;
    const unsigned k = m == 0 ? 1 : optimal_k(m, false_negatives);
    BloomFilter backup(m, k, seed);
    for (std::size_t i = 0; i < key_scores.size(); ++i) {
        if (key_scores[i] <= tau) backup.insert_hash(key_hashes[i], k);
    }
    return backup;
}

std::string format_config(std::size_t g, double c_bar) {
    std::ostringstream s;
    s << "g=" << g << " c_bar=" << c_bar;
    return s.str();
}

}  // namespace

std::vector<double> threshold_candidates(std::vector<double> scores, std::size_t count) {
    if (scores.empty()) throw InvalidArgument("threshold_candidates: no scores");
    if (count == 0) throw InvalidArgument("threshold_candidates: need at least one threshold");
    std::sort(scores.begin(), scores.end());
    std::vector<double> out;
    const double last = static_cast<double>(scores.size() - 1);
    for (std::size_t i = 0; i < count; ++i) {
        const double pos = count == 1 ? last : last * static_cast<double>(i) / static_cast<double>(count - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, scores.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        out.push_back(scores[lo] + frac * (scores[hi] - scores[lo]));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::optional<std::vector<double>> geometric_boundaries(const std::vector<double>& sorted_scores, std::size_t g,
                                                        double c_bar) {
    if (g < 2) throw InvalidArgument("geometric_boundaries: need g >= 2");
    if (!(c_bar > 0)) throw InvalidArgument("geometric_boundaries: c_bar must be positive");
    const auto n = static_cast<double>(sorted_scores.size());
    // Group g-1 (top) holds `unit` non-keys, group j holds unit * c_bar^(g-1-j).
    double total_weight = 0;
    for (std::size_t i = 0; i < g; ++i) total_weight += std::pow(c_bar, static_cast<double>(i));
    const double unit = n / total_weight;

    std::vector<double> out;
    double cumulative = 0;
    for (std::size_t j = 0; j + 1 < g; ++j) {
        cumulative += unit * std::pow(c_bar, static_cast<double>(g - 1 - j));
        auto count = static_cast<std::size_t>(std::llround(cumulative));
        count = std::clamp<std::size_t>(count, 1, sorted_scores.size());
        const double boundary = sorted_scores[count - 1];
        if (!out.empty() && !(boundary > out.back())) return std::nullopt;
        out.push_back(boundary);
    }
    return out;
}

std::vector<double> quantile_boundaries(const std::vector<double>& sorted_scores, std::size_t g) {
    if (g < 2) throw InvalidArgument("quantile_boundaries: need g >= 2");
    std::vector<double> out;
    const auto n = static_cast<double>(sorted_scores.size());
    for (std::size_t j = 1; j < g; ++j) {
        auto count = static_cast<std::size_t>(std::llround(n * static_cast<double>(j) / static_cast<double>(g)));
        count = std::clamp<std::size_t>(count, 1, sorted_scores.size());
        out.push_back(sorted_scores[count - 1]);
    }
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<unsigned> adabf_probe_counts(unsigned max_probes, std::size_t g) {
    if (g < 2) throw InvalidArgument("adabf_probe_counts: need g >= 2");
    std::vector<unsigned> out(g);
    for (std::size_t j = 0; j < g; ++j) {
        out[j] = static_cast<unsigned>(
            std::lround(static_cast<double>(max_probes) * static_cast<double>(g - 1 - j) / static_cast<double>(g - 1)));
    }
    return out;
}

// --- Builders ----------------------------------------------------------------

Lbf build_lbf(ClassifierPtr classifier, const RowList& keys, const RowList& train_non_keys, std::uint64_t budget_bits,
              const LbfOptions& options) {
    require_inputs(classifier, keys, train_non_keys, "build_lbf");
    const std::uint64_t m = remaining_budget(*classifier, budget_bits);
    const std::uint64_t seed = mix_seed(options.seed, kBackupStream);

    const auto key_scores = classifier->score_all(keys);
    const auto non_key_scores = classifier->score_all(train_non_keys);
    const auto key_hashes = hash_rows(keys, seed);
    const auto non_key_hashes = hash_rows(train_non_keys, seed);
    const auto taus = threshold_candidates(non_key_scores, options.tau_grid_size);

    double best_fpr = 2.0;
    double best_tau = taus.front();
    for (double tau : taus) {
        const auto backup = make_backup(key_scores, key_hashes, tau, m, seed);
        std::size_t accepted = 0;
        for (std::size_t i = 0; i < non_key_scores.size(); ++i) {
            if (non_key_scores[i] > tau) {
                ++accepted;
            } else if (backup && backup->contains_hash(non_key_hashes[i], backup->k())) {
                ++accepted;
            }
        }
        const double fpr = static_cast<double>(accepted) / static_cast<double>(non_key_scores.size());
        if (fpr < best_fpr) {
            best_fpr = fpr;
            best_tau = tau;
        }
    }

    Lbf out(classifier, best_tau, make_backup(key_scores, key_hashes, best_tau, m, seed));
    out.info.train_fpr = best_fpr;
    out.info.candidates = taus.size();
    if (out.backup() && out.backup()->degenerate()) out.info.warnings.push_back("backup filter has zero bits");
    return out;
}

Slbf build_slbf(ClassifierPtr classifier, const RowList& keys, const RowList& train_non_keys,
                std::uint64_t budget_bits, const SlbfOptions& options) {
    require_inputs(classifier, keys, train_non_keys, "build_slbf");
    if (options.split_grid.empty()) throw InvalidArgument("build_slbf: empty split grid");
    const std::uint64_t remaining = remaining_budget(*classifier, budget_bits);
    const std::uint64_t initial_seed = mix_seed(options.seed, kInitialStream);
    const std::uint64_t backup_seed = mix_seed(options.seed, kBackupStream);

    const auto key_scores = classifier->score_all(keys);
    const auto non_key_scores = classifier->score_all(train_non_keys);
    const auto key_hashes_initial = hash_rows(keys, initial_seed);
    const auto key_hashes_backup = hash_rows(keys, backup_seed);
    const auto non_key_hashes_initial = hash_rows(train_non_keys, initial_seed);
    const auto non_key_hashes_backup = hash_rows(train_non_keys, backup_seed);
    const auto taus = threshold_candidates(non_key_scores, options.tau_grid_size);

    auto make_initial = [&](std::uint64_t m) {
        BloomFilter initial(m, m == 0 ? 1 : optimal_k(m, keys.size()), initial_seed);
        for (const auto& h : key_hashes_initial) initial.insert_hash(h, initial.k());
        return initial;
    };
    // Which training non-keys survive an initial filter of m bits.
    auto survivors_of = [&](const BloomFilter& initial) {
        std::vector<std::uint8_t> pass(train_non_keys.size());
        for (std::size_t i = 0; i < pass.size(); ++i) {
            pass[i] = initial.contains_hash(non_key_hashes_initial[i], initial.k());
        }
        return pass;
    };

    // Split point -> initial-filter size. The entry with split 1 (whole
    // remaining budget) only serves thresholds without false negatives.
    struct SplitCache {
        double split;
        std::uint64_t m_initial;
        std::vector<std::uint8_t> pass;
    };
    std::vector<SplitCache> splits;
    for (double split : options.split_grid) {
        if (!(split >= 0.0 && split <= 1.0)) throw InvalidArgument("build_slbf: split fractions must lie in [0, 1]");
        const auto m_initial = static_cast<std::uint64_t>(std::floor(split * static_cast<double>(remaining)));
        splits.push_back({split, m_initial, survivors_of(make_initial(m_initial))});
    }
    std::optional<SplitCache> whole;

    double best_fpr = 2.0;
    double best_tau = taus.front();
    double best_split = 1.0;
    std::uint64_t best_m_initial = remaining;
    std::size_t candidates = 0;

    for (double tau : taus) {
        std::size_t false_negatives = 0;
        for (double s : key_scores) false_negatives += (s <= tau);

        auto evaluate = [&](const SplitCache& split, const std::optional<BloomFilter>& backup) {
            ++candidates;
            std::size_t accepted = 0;
            for (std::size_t i = 0; i < non_key_scores.size(); ++i) {
                if (!split.pass[i]) continue;
                if (non_key_scores[i] > tau || (backup && backup->contains_hash(non_key_hashes_backup[i], backup->k()))) {
                    ++accepted;
                }
            }
            const double fpr = static_cast<double>(accepted) / static_cast<double>(non_key_scores.size());
            if (fpr < best_fpr) {
                best_fpr = fpr;
                best_tau = tau;
                best_split = split.split;
                best_m_initial = split.m_initial;
            }
        };

        if (false_negatives == 0) {
            // No backup needed: the initial filter takes the whole remainder.
            if (!whole) whole = SplitCache{1.0, remaining, survivors_of(make_initial(remaining))};
            evaluate(*whole, std::nullopt);
            continue;
        }
        for (const auto& split : splits) {
            const std::uint64_t m_backup = remaining - split.m_initial;
            // A backup without bits cannot hold the classifier's false negatives.
            if (m_backup == 0) continue;
            evaluate(split, make_backup(key_scores, key_hashes_backup, tau, m_backup, backup_seed));
        }
    }
    if (candidates == 0) {
        throw InfeasibleThreshold("build_slbf: every split leaves the backup filter without bits");
    }

    auto backup = make_backup(key_scores, key_hashes_backup, best_tau, remaining - best_m_initial, backup_seed);
    Slbf out(make_initial(best_m_initial), classifier, best_tau, std::move(backup), best_split);
    out.info.train_fpr = best_fpr;
    out.info.candidates = candidates;
    if (out.initial().degenerate()) out.info.warnings.push_back("initial filter has zero bits");
    return out;
}

AdaBf build_adabf(ClassifierPtr classifier, const RowList& keys, const RowList& train_non_keys,
                  std::uint64_t budget_bits, const AdaBfOptions& options) {
    require_inputs(classifier, keys, train_non_keys, "build_adabf");
    if (options.g_min < 2 || options.g_max < options.g_min) throw InvalidArgument("build_adabf: need 2 <= g_min <= g_max");
    if (options.c_bar_grid.empty()) throw InvalidArgument("build_adabf: empty c_bar grid");
    const std::uint64_t m = remaining_budget(*classifier, budget_bits);
    const std::uint64_t seed = mix_seed(options.seed, kAdaStream);

    const auto key_scores = classifier->score_all(keys);
    const auto non_key_scores = classifier->score_all(train_non_keys);
    const auto key_hashes = hash_rows(keys, seed);
    const auto non_key_hashes = hash_rows(train_non_keys, seed);
    auto sorted_scores = non_key_scores;
    std::sort(sorted_scores.begin(), sorted_scores.end());

    struct Candidate {
        std::vector<double> boundaries;
        std::vector<unsigned> probes;
        unsigned max_probes = 1;
        std::size_t g = 0;
        double c_bar = 0;
    };

    auto group_of = [](const std::vector<double>& boundaries, double s) {
        return static_cast<std::size_t>(std::lower_bound(boundaries.begin(), boundaries.end(), s) - boundaries.begin());
    };

    auto build_bits = [&](const Candidate& c) {
        BloomFilter bits(m, c.max_probes, seed);
        for (std::size_t i = 0; i < key_scores.size(); ++i) {
            const unsigned probes = c.probes[group_of(c.boundaries, key_scores[i])];
            if (probes > 0) bits.insert_hash(key_hashes[i], probes);
        }
        return bits;
    };

    std::vector<std::string> warnings;
    std::optional<Candidate> best;
    double best_fpr = 2.0;
    std::size_t candidates = 0;

    for (std::size_t g = options.g_min; g <= options.g_max; ++g) {
        for (double c_bar : options.c_bar_grid) {
            Candidate c;
            c.g = g;
            c.c_bar = c_bar;
            if (auto b = geometric_boundaries(sorted_scores, g, c_bar)) {
                c.boundaries = std::move(*b);
            } else {
                c.boundaries = quantile_boundaries(sorted_scores, g);
                warnings.push_back(format_config(g, c_bar) + ": scores too discrete, used " +
                                   std::to_string(c.boundaries.size() + 1) + " quantile groups");
            }
            const std::size_t groups = c.boundaries.size() + 1;
            std::size_t tested_keys = 0;
            for (double s : key_scores) tested_keys += (group_of(c.boundaries, s) + 1 < groups);
            c.max_probes = optimal_k(m, std::max<std::size_t>(1, tested_keys));
            c.probes = adabf_probe_counts(c.max_probes, groups);

            const auto bits = build_bits(c);
            std::size_t accepted = 0;
            for (std::size_t i = 0; i < non_key_scores.size(); ++i) {
                const unsigned probes = c.probes[group_of(c.boundaries, non_key_scores[i])];
                if (probes == 0 || bits.contains_hash(non_key_hashes[i], probes)) ++accepted;
            }
            ++candidates;
            const double fpr = static_cast<double>(accepted) / static_cast<double>(non_key_scores.size());
            if (fpr < best_fpr) {
                best_fpr = fpr;
                best = std::move(c);
            }
        }
    }

    auto bits = build_bits(*best);
    AdaBf out(classifier, best->boundaries, best->probes, std::move(bits), best->g, best->c_bar);
    out.info.train_fpr = best_fpr;
    out.info.candidates = candidates;
    out.info.warnings = std::move(warnings);
    return out;
}

// --- Any filter -------------------------------------------------------------

std::string to_string(FilterVariant v) {
    switch (v) {
        case FilterVariant::bf: return "bf";
        case FilterVariant::lbf: return "lbf";
        case FilterVariant::slbf: return "slbf";
        case FilterVariant::adabf: return "adabf";
    }
    return "?";
}

FilterVariant parse_filter_variant(const std::string& name) {
    if (name == "bf") return FilterVariant::bf;
    if (name == "lbf") return FilterVariant::lbf;
    if (name == "slbf") return FilterVariant::slbf;
    if (name == "adabf") return FilterVariant::adabf;
    throw InvalidArgument("unknown filter variant '" + name + "' (expected bf, lbf, slbf or adabf)");
}

FilterVariant variant_of(const AnyFilter& f) { return static_cast<FilterVariant>(f.index()); }

bool filter_contains(const AnyFilter& f, FeatureView x) {
    return std::visit([&](const auto& filter) { return filter.contains(x); }, f);
}

double empirical_fpr(const AnyFilter& f, const RowList& non_keys) {
    return std::visit([&](const auto& filter) { return empirical_fpr(filter, non_keys); }, f);
}

std::uint64_t filter_total_bits(const AnyFilter& f) {
    return std::visit(
        [](const auto& filter) -> std::uint64_t {
            if constexpr (std::is_same_v<std::decay_t<decltype(filter)>, BloomFilter>) {
                return filter.size_bits();
            } else {
                return filter.total_size_bits();
            }
        },
        f);
}

namespace {

std::string fmt(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace

std::string describe_filter(const AnyFilter& f) {
    return std::visit(
        [](const auto& filter) -> std::string {
            using T = std::decay_t<decltype(filter)>;
            if constexpr (std::is_same_v<T, BloomFilter>) {
                return "m=" + std::to_string(filter.m()) + ";k=" + std::to_string(filter.k());
            } else if constexpr (std::is_same_v<T, Lbf>) {
                std::string s = "tau=" + fmt(filter.tau());
                if (filter.backup()) {
                    s += ";backup_m=" + std::to_string(filter.backup()->m()) +
                         ";backup_k=" + std::to_string(filter.backup()->k());
                } else {
                    s += ";backup=none";
                }
                return s;
            } else if constexpr (std::is_same_v<T, Slbf>) {
                std::string s = "tau=" + fmt(filter.tau()) + ";lambda=" + fmt(filter.split()) +
                                ";initial_m=" + std::to_string(filter.initial().m()) +
                                ";initial_k=" + std::to_string(filter.initial().k());
                if (filter.backup()) {
                    s += ";backup_m=" + std::to_string(filter.backup()->m()) +
                         ";backup_k=" + std::to_string(filter.backup()->k());
                } else {
                    s += ";backup=none";
                }
                return s;
            } else {
                std::string k;
                for (auto v : filter.k_per_group()) k += (k.empty() ? "" : "/") + std::to_string(v);
                return "g=" + std::to_string(filter.groups_requested()) + ";groups=" + std::to_string(filter.groups()) +
                       ";c_bar=" + fmt(filter.c_bar()) + ";k_per_group=" + k;
            }
        },
        f);
}

const BuildInfo* build_info(const AnyFilter& f) {
    return std::visit(
        [](const auto& filter) -> const BuildInfo* {
            if constexpr (std::is_same_v<std::decay_t<decltype(filter)>, BloomFilter>) {
                return nullptr;
            } else {
                return &filter.info;
            }
        },
        f);
}

namespace {

constexpr char kContainerMagic[] = "LBFF";
constexpr std::uint16_t kContainerVersion = 1;

void put_optional_filter(ByteWriter& out, const std::optional<BloomFilter>& f) {
    out.put<std::uint8_t>(f ? 1 : 0);
    if (f) out.put_block(f->serialize());
}

std::optional<BloomFilter> get_optional_filter(ByteReader& in) {
    if (in.get<std::uint8_t>() == 0) return std::nullopt;
    return BloomFilter::deserialize(in.get_block());
}

}  // namespace

std::vector<std::uint8_t> serialize_filter(const AnyFilter& f) {
    ByteWriter out;
    out.put_tag({kContainerMagic, 4});
    out.put<std::uint16_t>(kContainerVersion);
    out.put<std::uint8_t>(static_cast<std::uint8_t>(variant_of(f)));
    std::visit(
        [&](const auto& filter) {
            using T = std::decay_t<decltype(filter)>;
            if constexpr (std::is_same_v<T, BloomFilter>) {
                out.put_block(filter.serialize());
            } else if constexpr (std::is_same_v<T, Lbf>) {
                out.put_block(filter.classifier().encode());
                out.put<double>(filter.tau());
                put_optional_filter(out, filter.backup());
            } else if constexpr (std::is_same_v<T, Slbf>) {
                out.put_block(filter.classifier().encode());
                out.put<double>(filter.tau());
                out.put<double>(filter.split());
                out.put_block(filter.initial().serialize());
                put_optional_filter(out, filter.backup());
            } else {
                out.put_block(filter.classifier().encode());
                out.put<std::uint32_t>(static_cast<std::uint32_t>(filter.groups_requested()));
                out.put<double>(filter.c_bar());
                out.put<std::uint32_t>(static_cast<std::uint32_t>(filter.boundaries().size()));
                for (double b : filter.boundaries()) out.put<double>(b);
                for (unsigned k : filter.k_per_group()) out.put<std::uint8_t>(static_cast<std::uint8_t>(k));
                out.put_block(filter.bits().serialize());
            }
        },
        f);
    return std::move(out).take();
}

AnyFilter deserialize_filter(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    in.expect_tag({kContainerMagic, 4});
    const auto version = in.get<std::uint16_t>();
    if (version != kContainerVersion) throw ParseError("unsupported filter container version " + std::to_string(version));
    const auto variant = in.get<std::uint8_t>();
    AnyFilter out;
    switch (static_cast<FilterVariant>(variant)) {
        case FilterVariant::bf: out = BloomFilter::deserialize(in.get_block()); break;
        case FilterVariant::lbf: {
            auto classifier = decode_classifier(in.get_block());
            const double tau = in.get<double>();
            out = Lbf(std::move(classifier), tau, get_optional_filter(in));
            break;
        }
        case FilterVariant::slbf: {
            auto classifier = decode_classifier(in.get_block());
            const double tau = in.get<double>();
            const double split = in.get<double>();
            auto initial = BloomFilter::deserialize(in.get_block());
            out = Slbf(std::move(initial), std::move(classifier), tau, get_optional_filter(in), split);
            break;
        }
        case FilterVariant::adabf: {
            auto classifier = decode_classifier(in.get_block());
            const auto groups_requested = in.get<std::uint32_t>();
            const double c_bar = in.get<double>();
            const auto n_boundaries = in.get<std::uint32_t>();
            if (n_boundaries > in.remaining() / 8) throw ParseError("filter container: bad boundary count");
            std::vector<double> boundaries(n_boundaries);
            for (auto& b : boundaries) b = in.get<double>();
            std::vector<unsigned> probes(n_boundaries + 1);
            for (auto& k : probes) k = in.get<std::uint8_t>();
            auto bits = BloomFilter::deserialize(in.get_block());
            out = AdaBf(std::move(classifier), std::move(boundaries), std::move(probes), std::move(bits),
                        groups_requested, c_bar);
            break;
        }
        default: throw ParseError("filter container: unknown variant " + std::to_string(variant));
    }
    if (!in.at_end()) throw ParseError("filter container: trailing bytes");
    return out;
}

}  // namespace lbf
