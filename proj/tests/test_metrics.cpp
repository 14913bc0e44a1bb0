#include "oracles.hpp"
#include "wropuf/metrics.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

using namespace wropuf;

namespace {

std::vector<ResponseWord> words(const std::vector<std::string> &bits) {
  std::vector<ResponseWord> out;
  for (const auto &b : bits) out.push_back(ResponseWord::from_bits(b));
  return out;
}

std::string random_bits(std::mt19937 &rng, std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(rng() & 1U ? '1' : '0');
  return s;
}

} // namespace

TEST(Hamming, CountsDifferingPositions) {
  const auto w = ResponseWord::from_bits("1011001110001111");
  EXPECT_EQ(hamming(w, w), 0U);
  EXPECT_EQ(hamming(ResponseWord::from_bits("0000"), ResponseWord::from_bits("1111")), 4U);
  EXPECT_EQ(hamming(ResponseWord::from_bits("1010101010101010"), ResponseWord::from_bits("0101010101010101")), 16U);
  EXPECT_EQ(hamming(ResponseWord::from_bits("1100"), ResponseWord::from_bits("1010")), 2U);
  EXPECT_EQ(hamming(ResponseWord::from_bits(""), ResponseWord::from_bits("")), 0U);
  EXPECT_THROW(hamming(ResponseWord::from_bits("1"), ResponseWord::from_bits("10")), ArgumentError);
}

TEST(Uniqueness, ThreeChipExample) {
  // Pairwise distances 2, 4, 2 over L = 4.
  EXPECT_NEAR(uniqueness(words({"0000", "0011", "1111"}), 4), 66.666666666666667, 1e-12);
  EXPECT_DOUBLE_EQ(uniqueness(words({"0000", "1111"}), 4), 100.0);
}

TEST(Uniqueness, ComplementPairIsFullyUnique) {
  EXPECT_DOUBLE_EQ(uniqueness(words({"10110010", "01001101"}), 8), 100.0);
  EXPECT_DOUBLE_EQ(uniqueness(words({"1011", "1011", "1011"}), 4), 0.0);
}

TEST(Reliability, Examples) {
  const auto ref = ResponseWord::from_bits("1100101011110000");
  EXPECT_DOUBLE_EQ(reliability(ref, std::vector<ResponseWord>{ref, ref, ref}, 16), 100.0);
  EXPECT_DOUBLE_EQ(reliability(ref, words({"1100101011110001"}), 16), 93.75);
  // Distances 1 and 3.
  EXPECT_DOUBLE_EQ(reliability(ResponseWord::from_bits("1100"), words({"1101", "0010"}), 4), 50.0);
  EXPECT_DOUBLE_EQ(reliability(ResponseWord::from_bits("1111"), words({"1111", "1110"}), 4), 87.5);
}

TEST(Uniformity, Examples) {
  EXPECT_DOUBLE_EQ(uniformity(words({"0000000000000000"}), 16), 0.0);
  EXPECT_DOUBLE_EQ(uniformity(std::vector<ResponseWord>{ResponseWord::from_hex("aaaa", 16)}, 16), 50.0);
  EXPECT_DOUBLE_EQ(uniformity(words({"1100", "1110"}), 4), 62.5);
}

TEST(Metrics, RejectDegenerateInput) {
  EXPECT_THROW(uniqueness(words({"0101"}), 4), ArgumentError);
  EXPECT_THROW(uniqueness(words({"0101", "011"}), 4), ArgumentError);
  EXPECT_THROW(reliability(ResponseWord::from_bits("01"), {}, 2), ArgumentError);
  EXPECT_THROW(uniformity({}, 4), ArgumentError);
}

TEST(Metrics, AgreeWithLiteralFormulasOnRandomWords) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t L = 1 + rng() % 40;
    const std::size_t n = 2 + rng() % 9;
    std::vector<std::string> bits;
    for (std::size_t i = 0; i < n; ++i) bits.push_back(random_bits(rng, L));
    const auto w = words(bits);
    EXPECT_NEAR(uniqueness(w, L), oracle::uniqueness(bits), 1e-9);
    EXPECT_NEAR(uniformity(w, L), oracle::uniformity(bits), 1e-9);
    const std::vector<std::string> samples(bits.begin() + 1, bits.end());
    EXPECT_NEAR(reliability(w.front(), std::span(w).subspan(1), L), oracle::reliability(bits.front(), samples),
                1e-9);
  }
}

TEST(Metrics, StayWithinPercentRange) {
  std::mt19937 rng(78);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::string> bits;
    for (int i = 0; i < 5; ++i) bits.push_back(random_bits(rng, 12));
    const auto w = words(bits);
    for (double m : {uniqueness(w, 12), uniformity(w, 12), reliability(w[0], w, 12)}) {
      EXPECT_GE(m, 0.0);
      EXPECT_LE(m, 100.0);
    }
  }
}

TEST(HdHistogram, MassAndMean) {
  HdHistogram h(HdHistogram::Population::Intra, 4);
  for (std::size_t d : {0, 0, 0, 2}) h.add(d);
  EXPECT_EQ(h.total, 4U);
  EXPECT_DOUBLE_EQ(h.mass_at(0), 0.75);
  EXPECT_DOUBLE_EQ(h.mass_at(1), 0.0);
  EXPECT_DOUBLE_EQ(h.mean(), 0.5);
  EXPECT_THROW(h.add(5), ArgumentError);
  EXPECT_STREQ(h.label(), "intra");
}

TEST(LinearFit, VoltageLine) {
  const std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {0.1, 2.0}, {0.2, 4.0}};
  const auto f = linear_fit(pts);
  EXPECT_NEAR(f.slope, 20.0, 1e-12);
  EXPECT_NEAR(f.intercept, 0.0, 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(LinearFit, ExactLine) {
  const std::vector<std::pair<double, double>> pts{{0.0, 1.0}, {1.0, 3.0}, {2.0, 5.0}};
  const auto f = linear_fit(pts);
  EXPECT_DOUBLE_EQ(f.slope, 2.0);
  EXPECT_DOUBLE_EQ(f.intercept, 1.0);
  EXPECT_DOUBLE_EQ(f.r2, 1.0);
}

TEST(LinearFit, NoisyExample) {
  // sxx = 5, sxy = 3.
  const std::vector<std::pair<double, double>> pts{{0.0, 0.0}, {1.0, 1.0}, {2.0, 1.0}, {3.0, 2.0}};
  const auto f = linear_fit(pts);
  EXPECT_NEAR(f.slope, 0.6, 1e-12);
  EXPECT_NEAR(f.intercept, 0.1, 1e-12);
  // ss_tot = 2, ss_res = 0.2.
  EXPECT_NEAR(f.r2, 0.9, 1e-12);
}

TEST(LinearFit, FlatAndDegenerate) {
  const std::vector<std::pair<double, double>> flat{{0.0, 2.0}, {1.0, 2.0}};
  EXPECT_DOUBLE_EQ(linear_fit(flat).r2, 1.0);
  EXPECT_DOUBLE_EQ(linear_fit(flat).slope, 0.0);
  const std::vector<std::pair<double, double>> one{{0.0, 2.0}};
  EXPECT_THROW(linear_fit(one), ArgumentError);
  const std::vector<std::pair<double, double>> vertical{{1.0, 2.0}, {1.0, 3.0}};
  EXPECT_THROW(linear_fit(vertical), ArgumentError);
}
