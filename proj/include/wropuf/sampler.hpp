#pragma once

// The PUF unit: RO1's output is latched into an FF array clocked by RO2, one
// bit per RO2 rising edge, starting from the simultaneous enable.

#include "wropuf/response_word.hpp"
#include "wropuf/ro_model.hpp"
#include "wropuf/rng.hpp"

#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

namespace wropuf {

struct PufUnit {
  RoInstance ro1;
  RoInstance ro2;
  CouplingMode coupling;
  std::size_t word_length = 16;
};

namespace detail {

enum : std::uint64_t { kStreamRo1Jitter = 1, kStreamRo2Jitter = 2 };

// Period ratio RO1/RO2 at `volts`. Computed as (T1/T2)(f1/f2) so that equal
// voltage sensitivities leave the ratio bit-identical to the reference one.
inline double period_ratio(const PufUnit &unit, double volts) {
  const double v0 = unit.ro1.reference_voltage;
  const double f1 = voltage_factor(unit.ro1.gamma, volts, v0);
  const double f2 = voltage_factor(unit.ro2.gamma, volts, v0);
  return (unit.ro1.period_at_ref / unit.ro2.period_at_ref) * (f1 / f2);
}

} // namespace detail

// One enable cycle. Time is measured in units of RO2's (uncoupled) period at
// the given voltage; only the period ratio affects the word.
inline ResponseWord sample_word(const PufUnit &unit, double volts, Seed seed) {
  if (unit.word_length == 0) throw ArgumentError("word_length must be >= 1");
  const CoupledPeriods periods =
      apply_coupling(detail::period_ratio(unit, volts), 1.0, unit.coupling);

  const double rho_j = periods.jitter_correlation;
  const double independent = std::sqrt(std::max(0.0, 1.0 - rho_j * rho_j));
  NormalStream shared(derive_seed(seed, {detail::kStreamRo1Jitter}));
  NormalStream own(derive_seed(seed, {detail::kStreamRo2Jitter}));

  JitterTrace ro1(periods.t1);
  JitterTrace ro2(periods.t2);
  const std::size_t ro2_needed = 2 * unit.word_length - 1;

  // Deviate i of RO1 and RO2 are drawn as a correlated pair; RO1 keeps going
  // until it covers RO2's last sampling edge.
  while (ro2.size() < ro2_needed || ro1.last_toggle() < ro2.last_toggle()) {
    const double a = shared();
    const double b = own();
    ro1.append(unit.ro1.jitter_sigma * a);
    if (ro2.size() < ro2_needed)
      ro2.append(unit.ro2.jitter_sigma * (rho_j * a + independent * b));
  }

  ResponseWord word(unit.word_length);
  for (std::size_t k = 0; k < unit.word_length; ++k)
    word.set(k, ro1.level_at(ro2.rising_edge(k)));
  return word;
}

// Bitwise majority over `words`; per-bit ties resolve to 0.
inline ResponseWord bitwise_majority(std::span<const ResponseWord> words) {
  if (words.empty()) throw ArgumentError("bitwise_majority needs at least one word");
  ResponseWord out(words.front().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::size_t ones = 0;
    for (const auto &w : words) ones += w[i];
    out.set(i, 2 * ones > words.size());
  }
  return out;
}

// Modal word over repeated enable cycles. If several words share the top
// count the bitwise majority over all repetitions is returned instead.
inline ResponseWord modal_word(std::span<const ResponseWord> words) {
  if (words.empty()) throw ArgumentError("modal_word needs at least one word");
  std::map<ResponseWord, std::size_t> counts;
  for (const auto &w : words) ++counts[w];
  const ResponseWord *best = nullptr;
  std::size_t best_count = 0;
  bool tied = false;
  for (const auto &[w, n] : counts) {
    if (n > best_count) {
      best = &w;
      best_count = n;
      tied = false;
    } else if (n == best_count) {
      tied = true;
    }
  }
  return tied ? bitwise_majority(words) : *best;
}

inline ResponseWord enroll_id(const PufUnit &unit, std::size_t repetitions, double volts,
                              Seed seed) {
  if (repetitions == 0) throw ArgumentError("enroll_id needs at least one repetition");
  std::vector<ResponseWord> words;
  words.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r)
    words.push_back(sample_word(unit, volts, derive_seed(seed, {r})));
  return modal_word(words);
}

} // namespace wropuf
