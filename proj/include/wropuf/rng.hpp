#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace wropuf {

using Seed = std::uint64_t;

namespace detail {

constexpr std::uint64_t splitmix_finalize(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace detail

// SplitMix64 bit generator. Small state makes it cheap to open one stream per
// campaign cell, which is how results stay independent of scheduling.
class SplitMix64 {
public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(Seed seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::splitmix_finalize(state_);
  }

private:
  std::uint64_t state_;
};

// Derive a child seed from a parent seed and an ordered tuple of keys.
// Distinct key tuples give unrelated streams; the mapping is stable across
// platforms and builds.
constexpr Seed derive_seed(Seed parent,
                           std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = detail::splitmix_finalize(parent ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t k : keys) {
    h = detail::splitmix_finalize(h + 0x9e3779b97f4a7c15ULL +
                                  detail::splitmix_finalize(k));
  }
  return h;
}

// Stream of standard normal deviates.
class NormalStream {
public:
  explicit NormalStream(Seed seed) : engine_(seed) {}

  double operator()() { return dist_(engine_); }

private:
  SplitMix64 engine_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

} // namespace wropuf
