#pragma once

// Binary BCH(31,16,7) over GF(2^5) with primitive polynomial x^5 + x^2 + 1,
// plus the code-offset fuzzy extractor that stabilizes noisy PUF IDs.
//
// Polynomials over GF(2) are stored as bit masks, bit i = coefficient of x^i.
// Codewords are systematic: parity in bits 0..14, message in bits 15..30.

#include "wropuf/error.hpp"
#include "wropuf/response_word.hpp"
#include "wropuf/rng.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace wropuf::bch {

inline constexpr unsigned kN = 31;
inline constexpr unsigned kK = 16;
inline constexpr unsigned kParityBits = kN - kK;
inline constexpr unsigned kDesignedDistance = 7;
inline constexpr unsigned kCorrectable = 3;
inline constexpr std::uint32_t kPrimitivePoly = 0x25; // x^5 + x^2 + 1
inline constexpr std::uint32_t kWordMask = (1U << kN) - 1;

namespace detail {

struct Gf32Tables {
  std::array<std::uint8_t, 62> exp{};
  std::array<int, 32> log{};
};

constexpr Gf32Tables build_gf32_tables() {
  Gf32Tables t;
  unsigned x = 1;
  for (int i = 0; i < 31; ++i) {
    t.exp[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x);
    t.exp[static_cast<std::size_t>(i + 31)] = static_cast<std::uint8_t>(x);
    t.log[x] = i;
    x <<= 1;
    if (x & 32U) x ^= kPrimitivePoly;
  }
  t.log[0] = -1;
  return t;
}

inline constexpr Gf32Tables kGf32Tables = build_gf32_tables();

} // namespace detail

// Element of GF(2^5).
class Gf32 {
public:
  constexpr Gf32() = default;
  constexpr explicit Gf32(unsigned value) : v_(static_cast<std::uint8_t>(value & 31U)) {}

  static constexpr Gf32 alpha_pow(int e) {
    e %= 31;
    if (e < 0) e += 31;
    return Gf32(detail::kGf32Tables.exp[static_cast<std::size_t>(e)]);
  }

  constexpr unsigned value() const noexcept { return v_; }
  constexpr bool is_zero() const noexcept { return v_ == 0; }

  // Discrete log base alpha; undefined for zero.
  constexpr int log() const { return detail::kGf32Tables.log[v_]; }

  constexpr Gf32 inverse() const {
    if (is_zero()) throw ArgumentError("zero has no inverse in GF(32)");
    return alpha_pow(31 - log());
  }

  constexpr Gf32 pow(unsigned e) const {
    if (is_zero()) return e == 0 ? Gf32(1) : Gf32(0);
    return alpha_pow(static_cast<int>((static_cast<unsigned>(log()) * e) % 31U));
  }

  friend constexpr Gf32 operator+(Gf32 a, Gf32 b) { return Gf32(a.v_ ^ b.v_); }
  friend constexpr Gf32 operator*(Gf32 a, Gf32 b) {
    if (a.is_zero() || b.is_zero()) return Gf32(0);
    return Gf32(detail::kGf32Tables.exp[static_cast<std::size_t>(a.log() + b.log())]);
  }
  friend constexpr Gf32 operator/(Gf32 a, Gf32 b) { return a * b.inverse(); }
  constexpr Gf32 &operator+=(Gf32 o) { return *this = *this + o; }
  constexpr Gf32 &operator*=(Gf32 o) { return *this = *this * o; }
  friend constexpr bool operator==(Gf32, Gf32) = default;

private:
  std::uint8_t v_ = 0;
};

// GF(2) polynomial helpers on bit masks.
inline constexpr int poly_degree(std::uint64_t p) {
  return p == 0 ? -1 : 63 - std::countl_zero(p);
}

inline constexpr std::uint64_t poly_mod(std::uint64_t a, std::uint64_t m) {
  const int dm = poly_degree(m);
  if (dm < 0) throw ArgumentError("polynomial modulus is zero");
  for (int d = poly_degree(a); d >= dm; d = poly_degree(a)) a ^= m << (d - dm);
  return a;
}

inline constexpr std::uint64_t poly_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r = 0;
  for (int i = 0; i <= poly_degree(b); ++i)
    if ((b >> i) & 1U) r ^= a << i;
  return r;
}

// Evaluates a GF(2) polynomial at a field element.
inline constexpr Gf32 poly_eval(std::uint64_t p, Gf32 x) {
  Gf32 acc;
  for (int d = poly_degree(p); d >= 0; --d) {
    acc = acc * x;
    if ((p >> d) & 1U) acc += Gf32(1);
  }
  return acc;
}

// Minimal polynomial of alpha^i: product of (x - alpha^j) over the
// cyclotomic coset of i. Coefficients land in GF(2).
inline std::uint64_t minimal_polynomial(unsigned i) {
  std::set<unsigned> coset;
  for (unsigned j = i % 31; coset.insert(j).second; j = (2 * j) % 31) {
  }
  std::vector<Gf32> coeffs{Gf32(1)}; // ascending powers
  for (unsigned j : coset) {
    const Gf32 root = Gf32::alpha_pow(static_cast<int>(j));
    std::vector<Gf32> next(coeffs.size() + 1);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      next[k + 1] += coeffs[k];
      next[k] += coeffs[k] * root;
    }
    coeffs = std::move(next);
  }
  std::uint64_t p = 0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (coeffs[k].value() > 1) throw std::logic_error("minimal polynomial not binary");
    if (coeffs[k].value() == 1) p |= 1ULL << k;
  }
  return p;
}

// lcm of the minimal polynomials of alpha^1..alpha^(2t); distinct cosets
// contribute once each, giving alpha, alpha^3, alpha^5 for t = 3.
inline std::uint32_t build_generator() {
  std::set<std::uint64_t> factors;
  for (unsigned i = 1; i <= 2 * kCorrectable; ++i) factors.insert(minimal_polynomial(i));
  std::uint64_t g = 1;
  for (auto f : factors) g = poly_mul(g, f);
  return static_cast<std::uint32_t>(g);
}

struct DecodeResult {
  std::uint32_t codeword;
  unsigned corrected;
};

class Bch31 {
public:
  Bch31() : Bch31(build_generator()) {}
  explicit Bch31(std::uint32_t generator) : generator_(generator) {
    if (poly_degree(generator) != static_cast<int>(kParityBits))
      throw ArgumentError("generator must have degree 15");
  }

  std::uint32_t generator() const noexcept { return generator_; }

  std::uint32_t encode(std::uint32_t message) const {
    if (message >> kK) throw ArgumentError("message wider than 16 bits");
    const std::uint64_t shifted = static_cast<std::uint64_t>(message) << kParityBits;
    return static_cast<std::uint32_t>(shifted | poly_mod(shifted, generator_));
  }

  static std::uint32_t message_of(std::uint32_t codeword) noexcept {
    return (codeword >> kParityBits) & ((1U << kK) - 1);
  }

  // Corrects up to three errors. Returns nullopt when the error locator is
  // inconsistent with its roots (more than three errors detected).
  std::optional<DecodeResult> decode(std::uint32_t received) const {
    if (received >> kN) throw ArgumentError("received word wider than 31 bits");

    std::array<Gf32, 2 * kCorrectable + 1> s{};
    bool clean = true;
    for (unsigned j = 1; j <= 2 * kCorrectable; ++j) {
      s[j] = poly_eval(received, Gf32::alpha_pow(static_cast<int>(j)));
      clean = clean && s[j].is_zero();
    }
    if (clean) return DecodeResult{received, 0};

    // Berlekamp-Massey: smallest LFSR (error locator) generating s[1..6].
    std::array<Gf32, 2 * kCorrectable + 2> lambda{}, prev{}, tmp{};
    lambda[0] = Gf32(1);
    prev[0] = Gf32(1);
    unsigned len = 0;
    unsigned shift = 1;
    Gf32 prev_disc(1);
    for (unsigned n = 0; n < 2 * kCorrectable; ++n) {
      Gf32 disc = s[n + 1];
      for (unsigned i = 1; i <= len; ++i) disc += lambda[i] * s[n + 1 - i];
      if (disc.is_zero()) {
        ++shift;
        continue;
      }
      tmp = lambda;
      const Gf32 scale = disc / prev_disc;
      for (std::size_t i = 0; i + shift < lambda.size(); ++i) lambda[i + shift] += scale * prev[i];
      if (2 * len <= n) {
        len = n + 1 - len;
        prev = tmp;
        prev_disc = disc;
        shift = 1;
      } else {
        ++shift;
      }
    }
    if (len > kCorrectable) return std::nullopt;

    // Chien search: error at position p iff lambda(alpha^-p) = 0.
    std::uint32_t error = 0;
    unsigned roots = 0;
    for (unsigned p = 0; p < kN; ++p) {
      const Gf32 x = Gf32::alpha_pow(-static_cast<int>(p));
      Gf32 acc;
      for (int i = static_cast<int>(len); i >= 0; --i) acc = acc * x + lambda[static_cast<std::size_t>(i)];
      if (acc.is_zero()) {
        error |= 1U << p;
        ++roots;
      }
    }
    if (roots != len) return std::nullopt;
    return DecodeResult{received ^ error, roots};
  }

private:
  std::uint32_t generator_;
};

inline const Bch31 &default_code() {
  static const Bch31 code;
  return code;
}

// ---------------------------------------------------------------------------
// Code-offset fuzzy extractor.

struct HelperData {
  std::uint32_t offset = 0;               // enrolled response XOR codeword
  std::optional<std::uint64_t> key_hash;  // integrity check on the key

  friend bool operator==(const HelperData &, const HelperData &) = default;
};

struct Enrollment {
  std::uint16_t key;
  HelperData helper;
};

// Non-cryptographic 64-bit check value used to detect a wrong reproduction.
inline std::uint64_t key_digest(std::uint16_t key) {
  return derive_seed(0x4243483331313637ULL, {key});
}

inline Enrollment fe_enroll(std::uint32_t response, Seed seed, const Bch31 &code = default_code()) {
  if (response >> kN) throw ArgumentError("response wider than 31 bits");
  SplitMix64 rng(seed);
  const auto key = static_cast<std::uint16_t>(
      std::uniform_int_distribution<std::uint32_t>(0, 0xffff)(rng));
  return {key, HelperData{code.encode(key) ^ response, key_digest(key)}};
}

inline std::optional<std::uint16_t> fe_reproduce(std::uint32_t response, const HelperData &helper,
                                                 const Bch31 &code = default_code()) {
  if ((response | helper.offset) >> kN) throw ArgumentError("response wider than 31 bits");
  const auto decoded = code.decode(response ^ helper.offset);
  if (!decoded) return std::nullopt;
  const auto key = static_cast<std::uint16_t>(Bch31::message_of(decoded->codeword));
  if (helper.key_hash && *helper.key_hash != key_digest(key)) return std::nullopt;
  return key;
}

// ---------------------------------------------------------------------------
// Mapping of composed IDs onto the 31-bit code: ID bits 0..30 are protected,
// any further bits (bit 31 of a 32-bit ID) are carried unprotected.

inline std::uint32_t protected_bits(const ResponseWord &id) {
  const std::size_t n = std::min<std::size_t>(id.size(), kN);
  return static_cast<std::uint32_t>(id.to_uint(0, n));
}

struct IdEnrollment {
  std::uint16_t key;
  HelperData helper;
};

inline IdEnrollment enroll_id_key(const ResponseWord &reference, Seed seed) {
  const auto e = fe_enroll(protected_bits(reference), seed);
  return {e.key, e.helper};
}

// Corrected ID: the protected part is rebuilt from the reproduced key and the
// tail is copied from the noisy input. nullopt on decode failure.
inline std::optional<ResponseWord> reproduce_id(const ResponseWord &noisy, const HelperData &helper) {
  const auto key = fe_reproduce(protected_bits(noisy), helper);
  if (!key) return std::nullopt;
  const std::uint32_t restored = default_code().encode(*key) ^ helper.offset;
  ResponseWord out = noisy;
  for (std::size_t i = 0; i < std::min<std::size_t>(noisy.size(), kN); ++i)
    out.set(i, (restored >> i) & 1U);
  return out;
}

// ---------------------------------------------------------------------------
// Self-test used by the CLI.

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

inline std::vector<CheckResult> selftest(const Bch31 &code, Seed seed = 0x5eed) {
  std::vector<CheckResult> out;
  const std::uint32_t g = code.generator();

  {
    const std::uint64_t x31_minus_1 = (1ULL << 31) | 1ULL;
    bool roots = true;
    for (int i = 1; i <= static_cast<int>(2 * kCorrectable); ++i)
      roots = roots && poly_eval(g, Gf32::alpha_pow(i)).is_zero();
    const bool ok = poly_degree(g) == 15 && poly_mod(x31_minus_1, g) == 0 && roots;
    char buf[64];
    std::snprintf(buf, sizeof buf, "g(x) = 0x%04x", g);
    out.push_back({"generator", ok, buf});
  }
  {
    unsigned min_weight = kN + 1;
    for (std::uint32_t m = 1; m < (1U << kK); ++m)
      min_weight = std::min(min_weight, static_cast<unsigned>(std::popcount(code.encode(m))));
    out.push_back({"minimum-distance", min_weight == kDesignedDistance,
                   "min nonzero weight " + std::to_string(min_weight)});
  }

  SplitMix64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> msg(0, 0xffff);
  std::uniform_int_distribution<unsigned> pos(0, kN - 1);
  {
    unsigned good = 0;
    for (int i = 0; i < 1000; ++i) {
      const std::uint32_t c = code.encode(msg(rng));
      const auto d = code.decode(c);
      good += d && d->codeword == c && d->corrected == 0;
    }
    out.push_back({"zero-error", good == 1000, std::to_string(good) + "/1000 identity"});
  }
  {
    const std::uint32_t c = code.encode(0xb5c3);
    unsigned good = 0, total = 0;
    for (unsigned i = 0; i < kN; ++i) {
      ++total;
      const auto d = code.decode(c ^ (1U << i));
      good += d && d->codeword == c && d->corrected == 1;
      for (unsigned j = i + 1; j < kN; ++j) {
        ++total;
        const auto d2 = code.decode(c ^ (1U << i) ^ (1U << j));
        good += d2 && d2->codeword == c && d2->corrected == 2;
      }
    }
    out.push_back({"one-two-error-exhaustive", good == total && total == 496,
                   std::to_string(good) + "/" + std::to_string(total)});
  }
  {
    constexpr unsigned trials = 10000;
    unsigned good = 0;
    for (unsigned t = 0; t < trials; ++t) {
      const std::uint32_t c = code.encode(msg(rng));
      std::uint32_t e = 0;
      while (std::popcount(e) < 3) e |= 1U << pos(rng);
      const auto d = code.decode(c ^ e);
      good += d && d->codeword == c && d->corrected == 3;
    }
    out.push_back({"three-error-random", good == trials,
                   std::to_string(good) + "/" + std::to_string(trials)});
  }
  return out;
}

} // namespace wropuf::bch
