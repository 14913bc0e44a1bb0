#pragma once

// Analytic area (transistor count) and latency (system-clock cycles) of the
// waveform RO-PUF versus the counter-based RO-PUF, for a given ID length.

#include "wropuf/error.hpp"

#include <cstdint>

namespace wropuf {

struct CostParams {
  std::uint64_t transistors_per_ro = 20;
  std::uint64_t transistors_per_ff = 30;
  std::uint64_t transistors_per_mux4 = 30;
  std::uint64_t transistors_per_full_adder = 20;
  std::uint64_t bits_required = 128;
  std::uint64_t bits_per_word = 16;
  std::uint64_t counter_bits = 16;
  std::uint64_t n_ros_conventional = 35;
  std::uint64_t mux4_per_mux = 21; // 16 + 4 + 1 four-input MUXs
  std::uint64_t n_mux = 2;
  // Waveform PUF layout: RO pairs, each feeding this many FF words.
  std::uint64_t ro_pairs = 2;
  std::uint64_t ff_words_per_pair = 2;

  void validate() const {
    if (bits_per_word == 0) throw ConfigError("bits_per_word", "must be >= 1");
  }
};

struct Cost {
  std::uint64_t transistors;
  std::uint64_t cycles;

  friend bool operator==(const Cost &, const Cost &) = default;
};

inline Cost wro_puf_cost(const CostParams &p) {
  p.validate();
  const std::uint64_t ros = 2 * p.ro_pairs;
  const std::uint64_t ffs = p.bits_per_word * p.ro_pairs * p.ff_words_per_pair;
  return {ros * p.transistors_per_ro + ffs * p.transistors_per_ff,
          (p.bits_required + p.bits_per_word - 1) / p.bits_per_word};
}

// ROs, two MUX trees, two counters and a full-adder comparator; one counter
// run per output bit.
inline Cost conventional_cost(const CostParams &p) {
  p.validate();
  return {p.n_ros_conventional * p.transistors_per_ro +
              p.n_mux * p.mux4_per_mux * p.transistors_per_mux4 +
              2 * p.counter_bits * p.transistors_per_ff +
              p.counter_bits * p.transistors_per_full_adder,
          p.counter_bits * p.bits_required};
}

} // namespace wropuf
