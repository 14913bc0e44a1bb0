#pragma once

// Chip populations, measurement campaigns and voltage handling.
//
// Every random draw is keyed by its grid coordinates, never by the order in
// which cells are evaluated:
//   RO realization   (master, chip, unit, role)
//   enrollment       (master, chip, unit)      -> repetition r
//   raw sample       (master, chip, unit, t)
// Samples are deliberately not keyed by voltage: the same enable cycle is
// replayed at every voltage, so voltage effects are measured against common
// jitter and any sub-list of voltages reproduces the same words.

#include "wropuf/bch.hpp"
#include "wropuf/error.hpp"
#include "wropuf/metrics.hpp"
#include "wropuf/parallel.hpp"
#include "wropuf/response_word.hpp"
#include "wropuf/rng.hpp"
#include "wropuf/ro_model.hpp"
#include "wropuf/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace wropuf {

struct CampaignConfig {
  std::size_t n_chips = 10;
  std::size_t pairs_per_id = 2;
  std::size_t word_length = 16;
  std::size_t samples = 5000;
  std::size_t enroll_repetitions = 101;
  std::vector<double> voltages{1.3};
  std::size_t id_length = 32;
  Seed master_seed = 1;

  void validate(const RoParams &params) const {
    if (n_chips < 2) throw ConfigError("n_chips", "at least two chips are required");
    if (pairs_per_id < 1) throw ConfigError("pairs_per_id", "must be >= 1");
    if (word_length < 1) throw ConfigError("word_length", "must be >= 1");
    if (samples < 1) throw ConfigError("samples", "must be >= 1");
    if (enroll_repetitions < 1) throw ConfigError("enroll_repetitions", "must be >= 1");
    if (id_length != pairs_per_id * word_length)
      throw ConfigError("id_length", "must equal pairs_per_id * word_length (" +
                                         std::to_string(pairs_per_id * word_length) + ")");
    if (voltages.empty()) throw ConfigError("voltages_v", "at least one voltage is required");
    for (std::size_t i = 0; i < voltages.size(); ++i) {
      params.validate_voltage(voltages[i]);
      for (std::size_t j = 0; j < i; ++j)
        if (voltages[i] == voltages[j]) throw ConfigError("voltages_v", "duplicate voltage");
    }
  }
};

struct Chip {
  std::size_t chip_id = 0;
  std::vector<PufUnit> units;
  Seed seed = 0;
};

namespace detail {

enum : std::uint64_t { kTagChip = 0xC41B, kTagRo = 0x520, kTagEnroll = 0xE4A0, kTagSample = 0x5A3B };
enum : std::uint64_t { kRoleRo1 = 1, kRoleRo2 = 2 };

inline bool same_voltage(double a, double b) { return std::abs(a - b) <= 1e-9; }

} // namespace detail

inline std::vector<Chip> build_population(const CampaignConfig &config, const RoParams &params,
                                          const CouplingMode &coupling) {
  params.validate();
  config.validate(params);
  std::vector<Chip> chips(config.n_chips);
  for (std::size_t c = 0; c < config.n_chips; ++c) {
    Chip &chip = chips[c];
    chip.chip_id = c;
    chip.seed = derive_seed(config.master_seed, {detail::kTagChip, c});
    for (std::size_t u = 0; u < config.pairs_per_id; ++u) {
      PufUnit unit;
      unit.ro1 = realize_ro(params, derive_seed(config.master_seed, {detail::kTagRo, c, u, detail::kRoleRo1}));
      unit.ro2 = realize_ro(params, derive_seed(config.master_seed, {detail::kTagRo, c, u, detail::kRoleRo2}));
      unit.coupling = coupling;
      unit.word_length = config.word_length;
      chip.units.push_back(unit);
    }
  }
  return chips;
}

// Raw and enrolled words on the full (chip, voltage, sample) grid.
class CampaignDataset {
public:
  CampaignConfig config;
  RoParams params;
  CouplingMode coupling;

  CampaignDataset() = default;
  CampaignDataset(CampaignConfig cfg, RoParams p, CouplingMode mode)
      : config(std::move(cfg)), params(p), coupling(mode),
        references_(config.n_chips * config.voltages.size()),
        raw_(config.n_chips * config.voltages.size() * config.samples) {}

  std::size_t n_voltages() const noexcept { return config.voltages.size(); }

  ResponseWord &reference(std::size_t chip, std::size_t v) { return references_.at(cell(chip, v)); }
  const ResponseWord &reference(std::size_t chip, std::size_t v) const {
    return references_.at(cell(chip, v));
  }
  ResponseWord &raw(std::size_t chip, std::size_t v, std::size_t t) {
    return raw_.at(cell(chip, v) * config.samples + t);
  }
  const ResponseWord &raw(std::size_t chip, std::size_t v, std::size_t t) const {
    return raw_.at(cell(chip, v) * config.samples + t);
  }
  std::span<const ResponseWord> raw_cell(std::size_t chip, std::size_t v) const {
    return std::span<const ResponseWord>(raw_).subspan(cell(chip, v) * config.samples,
                                                       config.samples);
  }

  std::optional<std::size_t> voltage_index(double volts) const {
    for (std::size_t v = 0; v < n_voltages(); ++v)
      if (detail::same_voltage(config.voltages[v], volts)) return v;
    return std::nullopt;
  }

  std::vector<ResponseWord> references_at(std::size_t v) const {
    std::vector<ResponseWord> out;
    for (std::size_t c = 0; c < config.n_chips; ++c) out.push_back(reference(c, v));
    return out;
  }

  // Every word present with length L.
  bool complete() const {
    const auto ok = [&](const ResponseWord &w) { return w.size() == config.id_length; };
    return std::all_of(references_.begin(), references_.end(), ok) &&
           std::all_of(raw_.begin(), raw_.end(), ok);
  }

private:
  std::size_t cell(std::size_t chip, std::size_t v) const { return chip * n_voltages() + v; }

  std::vector<ResponseWord> references_;
  std::vector<ResponseWord> raw_;
};

inline Seed enrollment_seed(Seed master, std::size_t chip, std::size_t unit) {
  return derive_seed(master, {detail::kTagEnroll, chip, unit});
}

inline Seed sample_seed(Seed master, std::size_t chip, std::size_t unit, std::size_t t) {
  return derive_seed(master, {detail::kTagSample, chip, unit, t});
}

inline ResponseWord enroll_chip(const Chip &chip, const CampaignConfig &config, double volts) {
  std::vector<ResponseWord> words;
  for (std::size_t u = 0; u < chip.units.size(); ++u)
    words.push_back(enroll_id(chip.units[u], config.enroll_repetitions, volts,
                              enrollment_seed(config.master_seed, chip.chip_id, u)));
  return compose_id(words);
}

inline ResponseWord sample_chip(const Chip &chip, const CampaignConfig &config, double volts,
                                std::size_t t) {
  std::vector<ResponseWord> words;
  for (std::size_t u = 0; u < chip.units.size(); ++u)
    words.push_back(
        sample_word(chip.units[u], volts, sample_seed(config.master_seed, chip.chip_id, u, t)));
  return compose_id(words);
}

inline CampaignDataset run_campaign(const std::vector<Chip> &chips, const CampaignConfig &config,
                                    const RoParams &params, const CouplingMode &coupling,
                                    std::size_t threads = 1) {
  if (chips.size() != config.n_chips)
    throw ArgumentError("population size differs from n_chips");
  CampaignDataset data(config, params, coupling);
  const std::size_t nv = config.voltages.size();
  constexpr std::size_t kBlock = 250;
  const std::size_t blocks = (config.samples + kBlock - 1) / kBlock;

  // Work item = (chip, voltage, block of samples); block 0 also enrolls.
  parallel_for(chips.size() * nv * blocks, threads, [&](std::size_t item) {
    const std::size_t b = item % blocks;
    const std::size_t v = (item / blocks) % nv;
    const std::size_t c = item / blocks / nv;
    const double volts = config.voltages[v];
    if (b == 0) data.reference(c, v) = enroll_chip(chips[c], config, volts);
    const std::size_t end = std::min(config.samples, (b + 1) * kBlock);
    for (std::size_t t = b * kBlock; t < end; ++t) data.raw(c, v, t) = sample_chip(chips[c], config, volts, t);
  });
  return data;
}

inline CampaignDataset simulate(const CampaignConfig &config, const RoParams &params,
                                const CouplingMode &coupling, std::size_t threads = 1) {
  return run_campaign(build_population(config, params, coupling), config, params, coupling, threads);
}

// ---------------------------------------------------------------------------
// Post-BCH stabilization of raw words against each chip's enrolled reference.

inline Seed helper_seed(Seed master, std::size_t chip, std::size_t v) {
  return derive_seed(master, {0xFE, chip, v});
}

// Fuzzy-extractor helper for every (chip, voltage) reference.
inline std::vector<bch::HelperData> enroll_helpers(const CampaignDataset &data) {
  std::vector<bch::HelperData> helpers;
  for (std::size_t c = 0; c < data.config.n_chips; ++c)
    for (std::size_t v = 0; v < data.n_voltages(); ++v)
      helpers.push_back(
          bch::enroll_id_key(data.reference(c, v), helper_seed(data.config.master_seed, c, v)).helper);
  return helpers;
}

// Raw word after reproduction; decode failures leave the raw word unchanged.
inline ResponseWord stabilize(const ResponseWord &raw, const bch::HelperData &helper) {
  auto fixed = bch::reproduce_id(raw, helper);
  return fixed ? std::move(*fixed) : raw;
}

// ---------------------------------------------------------------------------
// Voltage drift.

struct SweepPoint {
  double delta_v;
  double shift; // average HD at V minus average HD at V0
};

inline std::vector<SweepPoint> voltage_sweep(const CampaignDataset &data, double v0,
                                             bool post_bch = false) {
  const auto ref_index = data.voltage_index(v0);
  if (!ref_index) throw ArgumentError("dataset holds no words at the reference voltage");
  if (data.n_voltages() < 2) throw ArgumentError("sweep needs a voltage besides the reference");

  std::vector<bch::HelperData> helpers;
  if (post_bch) helpers = enroll_helpers(data);

  const auto mean_hd = [&](std::size_t v) {
    std::uint64_t total = 0;
    for (std::size_t c = 0; c < data.config.n_chips; ++c) {
      const ResponseWord &ref = data.reference(c, *ref_index);
      for (const auto &w : data.raw_cell(c, v))
        total += post_bch ? hamming(ref, stabilize(w, helpers[c * data.n_voltages() + *ref_index]))
                          : hamming(ref, w);
    }
    return static_cast<double>(total) /
           static_cast<double>(data.config.n_chips * data.config.samples);
  };

  const double baseline = mean_hd(*ref_index);
  std::vector<SweepPoint> out;
  for (std::size_t v = 0; v < data.n_voltages(); ++v)
    out.push_back({data.config.voltages[v] - v0, v == *ref_index ? 0.0 : mean_hd(v) - baseline});
  return out;
}

// Least-squares line of shift against |V - V0|; the drift is symmetric in
// the sign of the voltage change.
inline LinearFit sweep_fit(std::span<const SweepPoint> sweep) {
  std::vector<std::pair<double, double>> pts;
  for (const auto &p : sweep) pts.emplace_back(std::abs(p.delta_v), p.shift);
  return linear_fit(pts);
}

struct VoltageCorrection {
  ResponseWord id;
  double anchor_voltage;
  bool reproduced; // false: decoding failed and the raw ID was returned
};

// Picks the calibration voltage nearest the measured one (ties go to the
// lower voltage) and reproduces the raw ID against that voltage's reference.
inline VoltageCorrection correct_for_voltage(const ResponseWord &raw, double measured,
                                             const std::map<double, ResponseWord> &calibration,
                                             Seed seed = 0) {
  if (calibration.empty()) throw ArgumentError("empty voltage calibration table");
  auto best = calibration.begin();
  for (auto it = calibration.begin(); it != calibration.end(); ++it)
    if (std::abs(it->first - measured) < std::abs(best->first - measured)) best = it;
  const auto helper = bch::enroll_id_key(best->second, seed).helper;
  auto fixed = bch::reproduce_id(raw, helper);
  if (!fixed) return {raw, best->first, false};
  return {std::move(*fixed), best->first, true};
}

} // namespace wropuf
