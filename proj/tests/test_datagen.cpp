#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "lbf/complexity.hpp"
#include "lbf/datagen.hpp"
#include "lbf/error.hpp"

using namespace lbf;

namespace {

std::string temp_file(const std::string& name, const std::string& contents) {
    const auto path = (std::filesystem::temp_directory_path() / ("lbf_test_" + name)).string();
    std::ofstream(path) << contents;
    return path;
}

std::string url_header() {
    std::string h;
    for (int j = 1; j <= 17; ++j) h += "f" + std::to_string(j) + ",";
    return h + "label\n";
}

std::string url_row(double base, int label) {
    std::string r;
    for (int j = 0; j < 17; ++j) r += std::to_string(base + j) + ",";
    return r + std::to_string(label) + "\n";
}

}  // namespace

TEST(Generate, ParabolaLabel) {
    EXPECT_EQ(parabola_label(1, 2, 1), 1);
    EXPECT_EQ(parabola_label(1, 0.5, 1), 0);
    EXPECT_EQ(parabola_label(1, 1, 1), 0);  // on the curve is not a key
}

TEST(Generate, ClassCountsAndDeterminism) {
    const SynthConfig cfg{.a = 0.1, .r = 0.1, .rho = 2.5, .n1 = 1001, .seed = 4};
    const auto d = generate(cfg);
    EXPECT_EQ(cfg.n2(), 2503u);
    EXPECT_EQ(d.count_positive(), 1001u);
    EXPECT_EQ(d.count_negative(), 2503u);
    EXPECT_EQ(d.dimension(), 2u);
    const auto e = generate(cfg);
    EXPECT_TRUE(std::equal(d.features().begin(), d.features().end(), e.features().begin()));
    EXPECT_TRUE(std::equal(d.labels().begin(), d.labels().end(), e.labels().begin()));
    EXPECT_EQ(d.provenance().kind, ProvenanceKind::synthetic);
}

TEST(Generate, PairedFlips) {
    const auto d = generate({.a = 1.0, .r = 0.25, .rho = 1.0, .n1 = 1000, .seed = 5});
    std::size_t flipped_pos = 0;
    std::size_t flipped_neg = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const int clean = parabola_label(d.row(i)[0], d.row(i)[1], 1.0);
        if (clean == 1 && d.label(i) == 0) ++flipped_pos;
        if (clean == 0 && d.label(i) == 1) ++flipped_neg;
    }
    EXPECT_EQ(flipped_pos, 250u);
    EXPECT_EQ(flipped_neg, 250u);
    EXPECT_EQ(d.count_positive(), 1000u);
}

TEST(Generate, ImbalancedC2) {
    const auto d = generate({.a = 0.01, .rho = 5.0, .n1 = 100000, .seed = 6});
    EXPECT_NEAR(c2(d.count_positive(), d.count_negative()), 0.615, 1e-3);
}

TEST(Generate, HigherDimensions) {
    const auto d = generate({.a = 0.1, .n1 = 50, .q = 5, .seed = 7});
    EXPECT_EQ(d.dimension(), 5u);
    EXPECT_EQ(d.size(), 100u);
}

TEST(Generate, Errors) {
    EXPECT_THROW(generate({.a = 0.0}), InvalidArgument);
    EXPECT_THROW(generate({.r = 0.5}), InvalidArgument);
    EXPECT_THROW(generate({.rho = 0.5}), InvalidArgument);
    EXPECT_THROW(generate({.n1 = 0}), InvalidArgument);
    EXPECT_THROW(generate({.q = 1}), InvalidArgument);
    EXPECT_THROW(generate({.a = 1e12, .n1 = 100, .max_draws = 100000}), GenerationTimeout);
}

TEST(Csv, ThreeRowRoundTrip) {
    const auto path = temp_file("three.csv", "x1,x2,label\n0.1,-2.5,1\n3,4e-3,0\n 1.25 , 7 ,1\n");
    const auto d = load_csv(path);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.dimension(), 2u);
    EXPECT_EQ(d.row(0)[0], 0.1);
    EXPECT_EQ(d.row(0)[1], -2.5);
    EXPECT_EQ(d.row(1)[1], 4e-3);
    EXPECT_EQ(d.row(2)[0], 1.25);
    EXPECT_EQ(d.label(0), 1);
    EXPECT_EQ(d.label(1), 0);
    EXPECT_EQ(d.count_positive(), 2u);
}

TEST(Csv, SaveLoadIsExact) {
    const auto d = generate({.a = 0.3, .r = 0.1, .n1 = 200, .q = 3, .seed = 8});
    const auto path = (std::filesystem::temp_directory_path() / "lbf_test_roundtrip.csv").string();
    save_csv(d, path);
    const auto e = load_csv(path);
    ASSERT_EQ(e.size(), d.size());
    EXPECT_TRUE(std::equal(d.features().begin(), d.features().end(), e.features().begin()));
    EXPECT_TRUE(std::equal(d.labels().begin(), d.labels().end(), e.labels().begin()));
}

TEST(Csv, Errors) {
    EXPECT_THROW(load_csv(temp_file("empty.csv", "")), ParseError);
    EXPECT_THROW(load_csv(temp_file("header_only.csv", "a,label\n")), ParseError);
    EXPECT_THROW(load_csv("/nonexistent/file.csv"), ParseError);
    try {
        load_csv(temp_file("short.csv", "a,b,label\n1,2,0\n1,2\n"));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
    }
    try {
        load_csv(temp_file("text.csv", "a,b,label\n1,2,0\n3,4,1\nfoo,2,1\n"));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos) << e.what();
    }
    EXPECT_THROW(load_csv(temp_file("label.csv", "a,label\n1,2\n")), ParseError);
}

TEST(Csv, UrlLayout) {
    const auto good = temp_file("url.csv", url_header() + url_row(0, 1) + url_row(10, 0) + url_row(20, 0));
    const auto d = load_url_csv(good);
    EXPECT_EQ(d.dimension(), 17u);
    EXPECT_EQ(d.size(), 3u);
    EXPECT_EQ(d.count_positive(), 1u);
    EXPECT_EQ(d.row(1)[16], 26.0);
    EXPECT_EQ(d.provenance().kind, ProvenanceKind::url);
    EXPECT_THROW(load_url_csv(temp_file("notusl.csv", "a,b,label\n1,2,1\n")), ParseError);
}

TEST(Kmer, Encoding) {
    EXPECT_EQ(encode_kmer("TAATTACGAATGGT"), (std::vector<double>{1, 0, 0, 1, 1, 0, 2, 3, 0, 0, 1, 3, 3, 1}));
    EXPECT_EQ(encode_kmer("AAAAAAAAAAAAAA"), std::vector<double>(14, 0.0));
    EXPECT_THROW(encode_kmer("AAAAAAAAAAAAAN"), ParseError);
    EXPECT_THROW(encode_kmer("AAAA"), ParseError);
    EXPECT_EQ(kmer_from_code(kmer_code("TAATTACGAATGGT"), 14), "TAATTACGAATGGT");
    EXPECT_EQ(kmer_code("GGG", 3), 63u);
}

TEST(Kmer, NegativeSampling) {
    const auto ten = sample_negative_kmers(10, 14, {}, 1);
    EXPECT_EQ(std::set<std::string>(ten.begin(), ten.end()).size(), 10u);
    for (const auto& s : ten) EXPECT_NO_THROW(encode_kmer(s));
    EXPECT_EQ(ten, sample_negative_kmers(10, 14, {}, 1));

    std::vector<std::string> all_but_one;
    for (std::uint64_t c = 0; c < 64; ++c)
        if (c != 37) all_but_one.push_back(kmer_from_code(c, 3));
    EXPECT_EQ(sample_negative_kmers(1, 3, all_but_one, 5), (std::vector<std::string>{kmer_from_code(37, 3)}));
    EXPECT_THROW(sample_negative_kmers(2, 3, all_but_one, 5), InvalidArgument);

    const auto keys = sample_negative_kmers(5000, 8, {}, 2);
    const std::set<std::string> key_set(keys.begin(), keys.end());
    for (std::uint64_t seed : {3, 4}) {
        const auto negatives = sample_negative_kmers(20000, 8, keys, seed);
        EXPECT_EQ(std::set<std::string>(negatives.begin(), negatives.end()).size(), negatives.size());
        for (const auto& s : negatives) ASSERT_FALSE(key_set.contains(s));
    }
}

TEST(Kmer, FileAndDataset) {
    const auto path = temp_file("kmers.txt", "TAATTACGAATGGT\n\nAAAAAAAAAAAAAA\n");
    const auto keys = load_kmer_file(path);
    EXPECT_EQ(keys.size(), 2u);
    const auto negatives = sample_negative_kmers(3, 14, keys, 1);
    const auto d = kmer_dataset(keys, negatives);
    EXPECT_EQ(d.dimension(), 14u);
    EXPECT_EQ(d.count_positive(), 2u);
    EXPECT_EQ(d.count_negative(), 3u);
    EXPECT_EQ(d.row(0)[7], 3.0);
    try {
        load_kmer_file(temp_file("bad_kmers.txt", "TAATTACGAATGGT\nTAATTACGAATGGX\n"));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
    }
}
