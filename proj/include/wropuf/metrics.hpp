#pragma once

// Hamming-distance statistics and the three standard PUF quality metrics
// (uniqueness, reliability, uniformity), plus ordinary least squares.

#include "wropuf/error.hpp"
#include "wropuf/response_word.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wropuf {

inline std::size_t hamming(const ResponseWord &a, const ResponseWord &b) {
  if (a.size() != b.size())
    throw ArgumentError("hamming: length mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

namespace detail {

inline void require_length(std::span<const ResponseWord> words, std::size_t length,
                           const char *what) {
  for (const auto &w : words)
    if (w.size() != length)
      throw ArgumentError(std::string(what) + ": word of length " + std::to_string(w.size()) +
                          ", expected " + std::to_string(length));
}

} // namespace detail

// Mean pairwise distance between chip references, as a percentage of L.
inline double uniqueness(std::span<const ResponseWord> references, std::size_t length) {
  const std::size_t n = references.size();
  if (n < 2) throw ArgumentError("uniqueness needs at least two chips");
  if (length == 0) throw ArgumentError("uniqueness: zero ID length");
  detail::require_length(references, length, "uniqueness");
  std::uint64_t total = 0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) total += hamming(references[i], references[j]);
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(total) / pairs / static_cast<double>(length) * 100.0;
}

inline double reliability(const ResponseWord &reference, std::span<const ResponseWord> samples,
                          std::size_t length) {
  if (samples.empty()) throw ArgumentError("reliability needs at least one sample");
  if (length == 0 || reference.size() != length)
    throw ArgumentError("reliability: reference length differs from L");
  detail::require_length(samples, length, "reliability");
  std::uint64_t total = 0;
  for (const auto &s : samples) total += hamming(reference, s);
  const double mean_fraction = static_cast<double>(total) /
                               static_cast<double>(samples.size()) / static_cast<double>(length);
  return (1.0 - mean_fraction) * 100.0;
}

// Ones-fraction of each response, averaged over responses.
inline double uniformity(std::span<const ResponseWord> responses, std::size_t length) {
  if (responses.empty()) throw ArgumentError("uniformity needs at least one response");
  if (length == 0) throw ArgumentError("uniformity: zero ID length");
  detail::require_length(responses, length, "uniformity");
  std::uint64_t ones = 0;
  for (const auto &r : responses) ones += r.count_ones();
  return static_cast<double>(ones) / static_cast<double>(responses.size()) /
         static_cast<double>(length) * 100.0;
}

struct HdHistogram {
  enum class Population { Intra, Inter };

  Population population = Population::Intra;
  std::vector<std::uint64_t> counts; // index = distance, 0..L
  std::uint64_t total = 0;

  HdHistogram() = default;
  HdHistogram(Population pop, std::size_t length) : population(pop), counts(length + 1, 0) {}

  void add(std::size_t distance) {
    if (distance >= counts.size()) throw ArgumentError("distance exceeds ID length");
    ++counts[distance];
    ++total;
  }

  double mass_at(std::size_t distance) const {
    if (total == 0 || distance >= counts.size()) return 0.0;
    return static_cast<double>(counts[distance]) / static_cast<double>(total);
  }

  double mean() const {
    if (total == 0) return 0.0;
    double s = 0.0;
    for (std::size_t d = 0; d < counts.size(); ++d) s += static_cast<double>(d * counts[d]);
    return s / static_cast<double>(total);
  }

  const char *label() const noexcept { return population == Population::Intra ? "intra" : "inter"; }
};

struct LinearFit {
  double slope;
  double intercept;
  double r2;
};

inline LinearFit linear_fit(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ArgumentError("linear_fit needs at least two points");
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto &[x, y] : points) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto &[x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (!(sxx > 0.0)) throw ArgumentError("linear_fit: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto &[x, y] : points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss_res += r * r;
  }
  // A constant response is fit exactly by a flat line.
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

} // namespace wropuf
