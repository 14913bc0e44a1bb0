#pragma once

// Timing-level ring oscillator model: realized period under process
// variation, jittered square-wave output, linear voltage dependence and
// pairwise coupling.

#include "wropuf/error.hpp"
#include "wropuf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace wropuf {

struct RoParams {
  double nominal_period_s = 1e-9;          // ~1 GHz
  double process_sigma = 0.1;              // relative std-dev of realized period
  double jitter_sigma = 0.001;             // relative std-dev per half-period
  double voltage_sensitivity_mean = 0.5;   // fractional period change per volt
  double voltage_sensitivity_sigma = 0.1;  // spread of the above across ROs
  double reference_voltage = 1.3;

  void validate() const {
    if (!(nominal_period_s > 0.0) || !std::isfinite(nominal_period_s))
      throw ConfigError("nominal_period_s", "must be a positive finite time");
    if (!(process_sigma >= 0.0) || !std::isfinite(process_sigma))
      throw ConfigError("process_sigma", "must be >= 0");
    if (!(jitter_sigma >= 0.0) || !std::isfinite(jitter_sigma))
      throw ConfigError("jitter_sigma", "must be >= 0");
    if (!std::isfinite(voltage_sensitivity_mean))
      throw ConfigError("voltage_sensitivity_mean_per_v", "must be finite");
    if (!(voltage_sensitivity_sigma >= 0.0) || !std::isfinite(voltage_sensitivity_sigma))
      throw ConfigError("voltage_sensitivity_sigma_per_v", "must be >= 0");
    if (!(reference_voltage > 0.0) || !std::isfinite(reference_voltage))
      throw ConfigError("reference_voltage_v", "must be a positive voltage");
  }

  // Rejects a campaign voltage whose linearized period change could reach
  // 50% for any plausibly drawn sensitivity (mean plus six sigma).
  void validate_voltage(double volts) const {
    const double worst = (std::abs(voltage_sensitivity_mean) + 6.0 * voltage_sensitivity_sigma) *
                         std::abs(volts - reference_voltage);
    if (!std::isfinite(volts) || worst >= 0.5)
      throw ConfigError("voltages_v", "voltage " + std::to_string(volts) +
                                          " V is outside the linear model range");
  }
};

struct RoInstance {
  double period_at_ref = 0.0; // seconds
  double gamma = 0.0;         // per volt
  Seed stream_id = 0;
  double jitter_sigma = 0.0;
  double reference_voltage = 1.3;

  friend bool operator==(const RoInstance &, const RoInstance &) = default;
};

inline RoInstance realize_ro(const RoParams &params, Seed seed) {
  params.validate();
  NormalStream normal(seed);
  RoInstance inst;
  do {
    inst.period_at_ref = params.nominal_period_s * (1.0 + params.process_sigma * normal());
  } while (!(inst.period_at_ref > 0.0));
  inst.gamma = params.voltage_sensitivity_mean + params.voltage_sensitivity_sigma * normal();
  inst.stream_id = seed;
  inst.jitter_sigma = params.jitter_sigma;
  inst.reference_voltage = params.reference_voltage;
  return inst;
}

// Multiplier applied to the reference period at `volts`.
inline double voltage_factor(double gamma, double volts, double v0) {
  const double f = 1.0 - gamma * (volts - v0);
  if (!(f > 0.0))
    throw ModelRangeError("period would be non-positive at " + std::to_string(volts) + " V");
  return f;
}

inline double period_at_voltage(const RoInstance &inst, double volts, double v0) {
  return inst.period_at_ref * voltage_factor(inst.gamma, volts, v0);
}

inline double period_at_voltage(const RoInstance &inst, double volts) {
  return period_at_voltage(inst, volts, inst.reference_voltage);
}

// Realized output of one enable cycle: the oscillator starts low and toggles
// at cumulative half-period boundaries. A half-period is (T/2)(1 + d) where d
// is a jitter deviate; deviates are clipped symmetrically to +/-0.5 so the
// toggle instants are strictly increasing and the mean half-period stays T/2.
class JitterTrace {
public:
  static constexpr double kMaxDeviation = 0.5;

  explicit JitterTrace(double period) : half_period_(period / 2.0) {
    if (!(period > 0.0)) throw ArgumentError("trace period must be positive");
  }

  // Appends the next toggle given its already-scaled relative deviation.
  void append(double deviation) {
    cumulative_ += std::clamp(deviation, -kMaxDeviation, kMaxDeviation);
    const double index = static_cast<double>(toggles_.size() + 1);
    toggles_.push_back(half_period_ * (index + cumulative_));
  }

  std::size_t size() const noexcept { return toggles_.size(); }
  double toggle(std::size_t i) const { return toggles_.at(i); }
  double last_toggle() const { return toggles_.empty() ? 0.0 : toggles_.back(); }
  double half_period() const noexcept { return half_period_; }

  // k-th rising edge (k = 0 first), i.e. the odd-numbered boundary.
  double rising_edge(std::size_t k) const {
    if (2 * k >= toggles_.size()) throw TraceExhausted("rising edge beyond trace");
    return toggles_[2 * k];
  }

  // Output level at time t. At an exact toggle instant the pre-toggle level is
  // returned.
  bool level_at(double t) const {
    if (t < 0.0) throw ArgumentError("level_at requires t >= 0");
    if (toggles_.empty() || t > toggles_.back())
      throw TraceExhausted("t = " + std::to_string(t) + " lies beyond the realized trace");
    const auto passed = std::lower_bound(toggles_.begin(), toggles_.end(), t) - toggles_.begin();
    return (passed & 1) != 0;
  }

private:
  double half_period_;
  double cumulative_ = 0.0;
  std::vector<double> toggles_;
};

// Independent trace of `half_periods` toggles for one oscillator.
inline JitterTrace make_trace(double period, double jitter_sigma, std::size_t half_periods,
                              Seed seed) {
  JitterTrace trace(period);
  NormalStream normal(seed);
  for (std::size_t i = 0; i < half_periods; ++i) trace.append(jitter_sigma * normal());
  return trace;
}

inline bool level_at(const JitterTrace &trace, double t) { return trace.level_at(t); }

// Near-lock strength used for the capacitively coupled pair when no explicit
// strength is configured.
inline constexpr double kDefaultCapacitiveKappa = 0.98;

class CouplingMode {
public:
  enum class Kind { None, InverterLoop, Capacitive };

  constexpr CouplingMode() = default;

  static constexpr CouplingMode none() { return {}; }
  static constexpr CouplingMode inverter_loop() { return CouplingMode(Kind::InverterLoop, 0.0); }
  static CouplingMode capacitive(double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0))
      throw ConfigError("kappa", "capacitive coupling strength must lie in [0, 1]");
    return CouplingMode(Kind::Capacitive, kappa);
  }

  constexpr Kind kind() const noexcept { return kind_; }
  constexpr double kappa() const noexcept { return kappa_; }

  friend bool operator==(const CouplingMode &, const CouplingMode &) = default;

private:
  constexpr CouplingMode(Kind kind, double kappa) : kind_(kind), kappa_(kappa) {}

  Kind kind_ = Kind::None;
  double kappa_ = 0.0;
};

struct CoupledPeriods {
  double t1;
  double t2;
  double jitter_correlation;
};

// Period pulling between the pair. The inverter loop injection-locks both
// oscillators to the mean period with fully shared jitter; the capacitive
// mode pulls each period toward the other by kappa/2 of the difference.
inline CoupledPeriods apply_coupling(double t1, double t2, const CouplingMode &mode) {
  if (!(t1 > 0.0) || !(t2 > 0.0)) throw ArgumentError("apply_coupling requires positive periods");
  switch (mode.kind()) {
  case CouplingMode::Kind::InverterLoop: {
    const double locked = (t1 + t2) / 2.0;
    return {locked, locked, 1.0};
  }
  case CouplingMode::Kind::Capacitive: {
    if (mode.kappa() == 0.0) return {t1, t2, 0.0};
    if (mode.kappa() == 1.0) {
      const double locked = (t1 + t2) / 2.0;
      return {locked, locked, 1.0};
    }
    const double pull = mode.kappa() * (t1 - t2) / 2.0;
    return {t1 - pull, t2 + pull, mode.kappa()};
  }
  case CouplingMode::Kind::None:
    break;
  }
  return {t1, t2, 0.0};
}

} // namespace wropuf
