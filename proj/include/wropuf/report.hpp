#pragma once

// Dataset-level evaluation: HD distributions and the metrics report.

#include "wropuf/chip_sim.hpp"
#include "wropuf/metrics.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace wropuf {

struct HdDistributions {
  HdHistogram intra;
  HdHistogram inter;
};

// Intra: each chip's raw samples at `volts` against its reference. Inter: all
// unordered pairs of chip references. With post_bch, samples are first
// reproduced through the fuzzy extractor enrolled on the reference.
inline HdDistributions hd_distributions(const CampaignDataset &data, bool post_bch, double volts) {
  const auto v = data.voltage_index(volts);
  if (!v) throw ArgumentError("dataset holds no words at the requested voltage");
  if (!data.complete()) throw DataError("dataset grid is incomplete");
  const std::size_t L = data.config.id_length;
  HdDistributions out{HdHistogram(HdHistogram::Population::Intra, L),
                      HdHistogram(HdHistogram::Population::Inter, L)};

  std::vector<bch::HelperData> helpers;
  if (post_bch) helpers = enroll_helpers(data);

  for (std::size_t c = 0; c < data.config.n_chips; ++c) {
    const ResponseWord &ref = data.reference(c, *v);
    for (const auto &w : data.raw_cell(c, *v))
      out.intra.add(post_bch ? hamming(ref, stabilize(w, helpers[c * data.n_voltages() + *v]))
                             : hamming(ref, w));
  }
  for (std::size_t i = 0; i + 1 < data.config.n_chips; ++i)
    for (std::size_t j = i + 1; j < data.config.n_chips; ++j)
      out.inter.add(hamming(data.reference(i, *v), data.reference(j, *v)));
  return out;
}

inline HdDistributions hd_distributions(const CampaignDataset &data, bool post_bch) {
  return hd_distributions(data, post_bch, data.params.reference_voltage);
}

struct MetricsReport {
  double voltage = 0.0;
  bool post_bch = false;
  std::size_t id_length = 0;
  double uniqueness_pct = 0.0;
  std::vector<double> reliability_pct;
  double reliability_mean_pct = 0.0;
  std::vector<double> uniformity_pct;
  double uniformity_mean_pct = 0.0;
  HdHistogram intra;
  HdHistogram inter;
  std::optional<LinearFit> voltage_fit;
  std::vector<SweepPoint> sweep;
};

inline MetricsReport compute_report(const CampaignDataset &data, bool post_bch, double volts,
                                    bool with_sweep = false) {
  const auto v = data.voltage_index(volts);
  if (!v) throw ArgumentError("dataset holds no words at the requested voltage");
  if (!data.complete()) throw DataError("dataset grid is incomplete");
  const std::size_t L = data.config.id_length;

  MetricsReport r;
  r.voltage = data.config.voltages[*v];
  r.post_bch = post_bch;
  r.id_length = L;

  const auto refs = data.references_at(*v);
  r.uniqueness_pct = uniqueness(refs, L);

  std::vector<bch::HelperData> helpers;
  if (post_bch) helpers = enroll_helpers(data);

  for (std::size_t c = 0; c < data.config.n_chips; ++c) {
    std::vector<ResponseWord> samples(data.raw_cell(c, *v).begin(), data.raw_cell(c, *v).end());
    if (post_bch)
      for (auto &w : samples) w = stabilize(w, helpers[c * data.n_voltages() + *v]);
    r.reliability_pct.push_back(reliability(refs[c], samples, L));
    r.uniformity_pct.push_back(uniformity(samples, L));
  }
  const auto mean = [](const std::vector<double> &xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  };
  r.reliability_mean_pct = mean(r.reliability_pct);
  r.uniformity_mean_pct = mean(r.uniformity_pct);

  auto hd = hd_distributions(data, post_bch, volts);
  r.intra = std::move(hd.intra);
  r.inter = std::move(hd.inter);

  if (with_sweep && data.n_voltages() >= 2) {
    r.sweep = voltage_sweep(data, r.voltage, post_bch);
    r.voltage_fit = sweep_fit(r.sweep);
  }
  return r;
}

} // namespace wropuf
