#include "lbf/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "lbf/error.hpp"
#include "lbf/random.hpp"

namespace lbf {

// --- Synthetic data ---------------------------------------------------------

std::size_t SynthConfig::n2() const {
    return static_cast<std::size_t>(std::ceil(rho * static_cast<double>(n1) - 1e-9));
}

void SynthConfig::validate() const {
    if (!(a > 0) || !std::isfinite(a)) throw InvalidArgument("synthetic data: a must be positive");
    if (!(r >= 0 && r < 0.5)) throw InvalidArgument("synthetic data: r must lie in [0, 0.5)");
    if (!(rho >= 1) || !std::isfinite(rho)) throw InvalidArgument("synthetic data: rho must be >= 1");
    if (n1 == 0) throw InvalidArgument("synthetic data: n1 must be positive");
    if (q < 2) throw InvalidArgument("synthetic data: q must be >= 2");
    if (!(gamma > 0)) throw InvalidArgument("synthetic data: gamma must be positive");
}

int parabola_label(double x1, double x2, double a) { return x2 - a * x1 * x1 > 0 ? 1 : 0; }

LabeledDataset generate(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t n1 = cfg.n1;
    const std::size_t n2 = cfg.n2();
    const std::uint64_t cap = cfg.max_draws ? cfg.max_draws : 1000 * static_cast<std::uint64_t>(n1 + n2) + 1'000'000;

    Rng rng(mix_seed(cfg.seed, 0));
    std::normal_distribution<double> normal(0.0, std::sqrt(cfg.gamma));

    LabeledDataset data(cfg.q);
    std::vector<double> x(cfg.q);
    std::size_t have[2] = {0, 0};
    const std::size_t want[2] = {n2, n1};
    std::uint64_t draws = 0;
    while (have[0] < want[0] || have[1] < want[1]) {
        if (draws++ == cap) {
            throw GenerationTimeout("synthetic data: " + std::to_string(cap) + " draws gave only " +
                                    std::to_string(have[1]) + "/" + std::to_string(n1) + " positives and " +
                                    std::to_string(have[0]) + "/" + std::to_string(n2) + " negatives");
        }
        for (auto& v : x) v = normal(rng);
        const int label = parabola_label(x[0], x[1], cfg.a);
        if (have[label] == want[label]) continue;
        ++have[label];
        data.add(x, label);
    }

    const auto flips = static_cast<std::size_t>(std::floor(cfg.r * static_cast<double>(n1)));
    if (flips > 0) {
        auto pos = data.indices_with_label(1);
        auto neg = data.indices_with_label(0);
        std::shuffle(pos.begin(), pos.end(), rng);
        std::shuffle(neg.begin(), neg.end(), rng);
        std::vector<std::uint8_t> labels(data.labels().begin(), data.labels().end());
        for (std::size_t i = 0; i < flips; ++i) {
            labels[pos[i]] = 0;
            labels[neg[i]] = 1;
        }
        std::vector<double> features(data.features().begin(), data.features().end());
        data = LabeledDataset(cfg.q, std::move(features), std::move(labels));
    }

    Provenance p;
    p.kind = ProvenanceKind::synthetic;
    p.synthetic = {cfg.a, cfg.r, cfg.rho};
    data.set_provenance(p);
    return data;
}

// --- CSV ----------------------------------------------------------------------

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view field, const std::string& where) {
    field = trim(field);
    double value = 0;
    const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || end != field.data() + field.size() || !std::isfinite(value)) {
        throw ParseError(where + ": not a finite number: '" + std::string(field) + "'");
    }
    return value;
}

}  // namespace

LabeledDataset load_csv(const std::string& path, std::size_t q) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || trim(line).empty()) throw ParseError(path + ":1: missing header row");
    const std::size_t columns = split_commas(line).size();
    if (columns < 2) throw ParseError(path + ":1: need at least one feature column and a label column");
    if (q == 0) q = columns - 1;
    if (columns != q + 1) {
        throw ParseError(path + ":1: expected " + std::to_string(q + 1) + " columns, header has " +
                         std::to_string(columns));
    }

    LabeledDataset data(q);
    std::vector<double> row(q);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::string where = path + ":" + std::to_string(line_no);
        const auto fields = split_commas(line);
        if (fields.size() != q + 1) {
            throw ParseError(where + ": expected " + std::to_string(q + 1) + " fields, got " +
                             std::to_string(fields.size()));
        }
        for (std::size_t j = 0; j < q; ++j) row[j] = parse_number(fields[j], where);
        const double label = parse_number(fields[q], where);
        if (label != 0.0 && label != 1.0) throw ParseError(where + ": label must be 0 or 1");
        data.add(row, static_cast<int>(label));
    }
    if (data.empty()) throw ParseError(path + ": no data rows");
    Provenance p;
    p.source = path;
    data.set_provenance(p);
    return data;
}

LabeledDataset load_url_csv(const std::string& path) {
    auto data = load_csv(path, 17);
    Provenance p;
    p.kind = ProvenanceKind::url;
    p.source = path;
    data.set_provenance(p);
    return data;
}

void save_csv(const LabeledDataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
    for (std::size_t j = 0; j < data.dimension(); ++j) out << 'x' << (j + 1) << ',';
    out << "label\n";
    char buf[32];
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (double v : data.row(i)) {
            const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out.write(buf, end - buf);
            out << ',';
        }
        out << data.label(i) << '\n';
    }
    if (!out) throw InvalidArgument("failed writing '" + path + "'");
}

// --- k-mers -----------------------------------------------------------------

namespace {

constexpr char kBases[4] = {'A', 'T', 'C', 'G'};
constexpr std::size_t kMaxK = 31;

int base_code(char c) {
    switch (c) {
        case 'A': return 0;
        case 'T': return 1;
        case 'C': return 2;
        case 'G': return 3;
        default: return -1;
    }
}

void check_k(std::size_t k) {
    if (k == 0 || k > kMaxK) throw InvalidArgument("k-mer length must lie in [1, 31]");
}

}  // namespace

std::vector<double> encode_kmer(const std::string& kmer, std::size_t k) {
    check_k(k);
    if (kmer.size() != k) {
        throw ParseError("k-mer '" + kmer + "' has length " + std::to_string(kmer.size()) + ", expected " +
                         std::to_string(k));
    }
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) {
        const int code = base_code(kmer[i]);
        if (code < 0) throw ParseError("k-mer '" + kmer + "': invalid base at position " + std::to_string(i + 1));
        out[i] = code;
    }
    return out;
}

std::uint64_t kmer_code(const std::string& kmer, std::size_t k) {
    std::uint64_t code = 0;
    for (double v : encode_kmer(kmer, k)) code = code * 4 + static_cast<std::uint64_t>(v);
    return code;
}

std::string kmer_from_code(std::uint64_t code, std::size_t k) {
    check_k(k);
    std::string out(k, 'A');
    for (std::size_t i = k; i-- > 0;) {
        out[i] = kBases[code & 3];
        code >>= 2;
    }
    return out;
}

std::vector<std::string> sample_negative_kmers(std::size_t n, std::size_t k, const std::vector<std::string>& exclude,
                                               std::uint64_t seed) {
    check_k(k);
    const std::uint64_t space = std::uint64_t{1} << (2 * k);
    std::unordered_set<std::uint64_t> excluded;
    for (const auto& s : exclude) excluded.insert(kmer_code(s, k));
    if (excluded.size() > space || n > space - excluded.size()) {
        throw InvalidArgument("sample_negative_kmers: only " + std::to_string(space - excluded.size()) +
                              " k-mers available, " + std::to_string(n) + " requested");
    }

    Rng rng(mix_seed(seed, 0));
    std::vector<std::string> out;
    out.reserve(n);
    const std::uint64_t available = space - excluded.size();
    // Dense requests: partial shuffle of the explicit complement.
    if (available <= (std::uint64_t{1} << 22) || n > available / 2) {
        std::vector<std::uint64_t> pool;
        pool.reserve(available);
        for (std::uint64_t c = 0; c < space; ++c) {
            if (!excluded.contains(c)) pool.push_back(c);
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
            out.push_back(kmer_from_code(pool[i], k));
        }
        return out;
    }
    std::uniform_int_distribution<std::uint64_t> pick(0, space - 1);
    std::unordered_set<std::uint64_t> taken;
    while (out.size() < n) {
        const auto c = pick(rng);
        if (excluded.contains(c) || !taken.insert(c).second) continue;
        out.push_back(kmer_from_code(c, k));
    }
    return out;
}

std::vector<std::string> load_kmer_file(const std::string& path, std::size_t k) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto s = std::string(trim(line));
        if (s.empty()) continue;
        try {
            encode_kmer(s, k);
        } catch (const ParseError& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(s);
    }
    if (out.empty()) throw ParseError(path + ": no k-mers");
    return out;
}

LabeledDataset kmer_dataset(const std::vector<std::string>& keys, const std::vector<std::string>& non_keys,
                            std::size_t k) {
    LabeledDataset data(k);
    for (const auto& s : keys) data.add(encode_kmer(s, k), 1);
    for (const auto& s : non_keys) data.add(encode_kmer(s, k), 0);
    Provenance p;
    p.kind = ProvenanceKind::dna;
    data.set_provenance(p);
    return data;
}

}  // namespace lbf
