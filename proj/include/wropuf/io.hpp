#pragma once

// File formats: run configuration (JSON), campaign dataset (CSV plus JSON
// sidecar), fuzzy-extractor helper data (JSON) and metrics reports
// (JSON and CSV).

#include "wropuf/bch.hpp"
#include "wropuf/chip_sim.hpp"
#include "wropuf/error.hpp"
#include "wropuf/report.hpp"

#include "json.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace wropuf {

using json = nlohmann::json;

struct RunFlags {
  bool post_bch = true;
  bool emit_histograms = true;
  bool emit_sweep = false;

  friend bool operator==(const RunFlags &, const RunFlags &) = default;
};

struct RunConfig {
  RoParams ro;
  CampaignConfig campaign;
  CouplingMode coupling;
  std::string output_dir = "out";
  RunFlags flags;

  void validate() const {
    ro.validate();
    campaign.validate(ro);
  }
};

inline bool operator==(const RoParams &a, const RoParams &b) {
  return a.nominal_period_s == b.nominal_period_s && a.process_sigma == b.process_sigma &&
         a.jitter_sigma == b.jitter_sigma &&
         a.voltage_sensitivity_mean == b.voltage_sensitivity_mean &&
         a.voltage_sensitivity_sigma == b.voltage_sensitivity_sigma &&
         a.reference_voltage == b.reference_voltage;
}

inline bool operator==(const CampaignConfig &a, const CampaignConfig &b) {
  return a.n_chips == b.n_chips && a.pairs_per_id == b.pairs_per_id &&
         a.word_length == b.word_length && a.samples == b.samples &&
         a.enroll_repetitions == b.enroll_repetitions && a.voltages == b.voltages &&
         a.id_length == b.id_length && a.master_seed == b.master_seed;
}

inline bool operator==(const RunConfig &a, const RunConfig &b) {
  return a.ro == b.ro && a.campaign == b.campaign && a.coupling == b.coupling &&
         a.output_dir == b.output_dir && a.flags == b.flags;
}

namespace detail {

// Reads optional typed members out of one JSON object, rejecting unknown keys
// so that misspelled settings surface as errors.
class ObjectReader {
public:
  ObjectReader(const json &obj, std::string path, std::initializer_list<std::string_view> keys)
      : obj_(obj), path_(std::move(path)) {
    if (!obj.is_object()) throw ConfigError(path_, "expected a JSON object");
    for (const auto &[k, _] : obj.items()) {
      bool known = false;
      for (auto key : keys) known = known || key == k;
      if (!known) throw ConfigError(qualified(k), "unknown setting");
    }
  }

  void number(std::string_view key, double &out) const {
    if (const json *v = find(key)) {
      if (!v->is_number()) throw ConfigError(qualified(key), "expected a number");
      out = v->get<double>();
    }
  }

  void count(std::string_view key, std::size_t &out) const {
    if (const json *v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(qualified(key), "expected a non-negative integer");
      out = v->get<std::size_t>();
    }
  }

  void seed(std::string_view key, Seed &out) const {
    if (const json *v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(qualified(key), "expected an unsigned 64-bit integer");
      out = v->get<Seed>();
    }
  }

  void boolean(std::string_view key, bool &out) const {
    if (const json *v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(qualified(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(std::string_view key, std::string &out) const {
    if (const json *v = find(key)) {
      if (!v->is_string()) throw ConfigError(qualified(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(std::string_view key, std::vector<double> &out) const {
    if (const json *v = find(key)) {
      if (!v->is_array()) throw ConfigError(qualified(key), "expected an array of numbers");
      out.clear();
      for (const auto &x : *v) {
        if (!x.is_number()) throw ConfigError(qualified(key), "expected an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  const json *find(std::string_view key) const {
    auto it = obj_.find(std::string(key));
    return it == obj_.end() ? nullptr : &*it;
  }

  std::string qualified(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

private:
  const json &obj_;
  std::string path_;
};

inline std::string coupling_name(const CouplingMode &m) {
  switch (m.kind()) {
  case CouplingMode::Kind::InverterLoop: return "inverter_loop";
  case CouplingMode::Kind::Capacitive: return "capacitive";
  case CouplingMode::Kind::None: break;
  }
  return "none";
}

} // namespace detail

inline json to_json(const RoParams &p) {
  return {{"nominal_period_s", p.nominal_period_s},
          {"process_sigma", p.process_sigma},
          {"jitter_sigma", p.jitter_sigma},
          {"voltage_sensitivity_mean_per_v", p.voltage_sensitivity_mean},
          {"voltage_sensitivity_sigma_per_v", p.voltage_sensitivity_sigma},
          {"reference_voltage_v", p.reference_voltage}};
}

inline json to_json(const CampaignConfig &c) {
  return {{"n_chips", c.n_chips},
          {"pairs_per_id", c.pairs_per_id},
          {"word_length", c.word_length},
          {"samples", c.samples},
          {"enroll_repetitions", c.enroll_repetitions},
          {"voltages_v", c.voltages},
          {"id_length", c.id_length},
          {"master_seed", c.master_seed}};
}

inline json to_json(const CouplingMode &m) {
  return {{"mode", detail::coupling_name(m)}, {"kappa", m.kappa()}};
}

inline json to_json(const RunConfig &rc) {
  return {{"ro", to_json(rc.ro)},
          {"campaign", to_json(rc.campaign)},
          {"coupling", to_json(rc.coupling)},
          {"output_dir", rc.output_dir},
          {"flags",
           {{"post_bch", rc.flags.post_bch},
            {"emit_histograms", rc.flags.emit_histograms},
            {"emit_sweep", rc.flags.emit_sweep}}}};
}

inline RoParams ro_params_from_json(const json &j) {
  RoParams p;
  detail::ObjectReader r(j, "ro",
                         {"nominal_period_s", "process_sigma", "jitter_sigma",
                          "voltage_sensitivity_mean_per_v", "voltage_sensitivity_sigma_per_v",
                          "reference_voltage_v"});
  r.number("nominal_period_s", p.nominal_period_s);
  r.number("process_sigma", p.process_sigma);
  r.number("jitter_sigma", p.jitter_sigma);
  r.number("voltage_sensitivity_mean_per_v", p.voltage_sensitivity_mean);
  r.number("voltage_sensitivity_sigma_per_v", p.voltage_sensitivity_sigma);
  r.number("reference_voltage_v", p.reference_voltage);
  return p;
}

inline CampaignConfig campaign_from_json(const json &j) {
  CampaignConfig c;
  detail::ObjectReader r(j, "campaign",
                         {"n_chips", "pairs_per_id", "word_length", "samples", "enroll_repetitions",
                          "voltages_v", "id_length", "master_seed"});
  r.count("n_chips", c.n_chips);
  r.count("pairs_per_id", c.pairs_per_id);
  r.count("word_length", c.word_length);
  r.count("samples", c.samples);
  r.count("enroll_repetitions", c.enroll_repetitions);
  r.numbers("voltages_v", c.voltages);
  // Without an explicit id_length the composed length is implied.
  c.id_length = c.pairs_per_id * c.word_length;
  r.count("id_length", c.id_length);
  r.seed("master_seed", c.master_seed);
  return c;
}

inline CouplingMode coupling_from_json(const json &j) {
  detail::ObjectReader r(j, "coupling", {"mode", "kappa"});
  std::string mode = "none";
  double kappa = kDefaultCapacitiveKappa;
  r.string("mode", mode);
  r.number("kappa", kappa);
  if (mode == "none") return CouplingMode::none();
  if (mode == "inverter_loop") return CouplingMode::inverter_loop();
  if (mode == "capacitive") {
    if (!(kappa >= 0.0 && kappa <= 1.0)) throw ConfigError("coupling.kappa", "must lie in [0, 1]");
    return CouplingMode::capacitive(kappa);
  }
  throw ConfigError("coupling.mode", "expected none, inverter_loop or capacitive, got '" + mode + "'");
}

// Parses and validates a run configuration. Missing members take defaults.
inline RunConfig run_config_from_json(const json &j) {
  RunConfig rc;
  detail::ObjectReader r(j, "", {"ro", "campaign", "coupling", "output_dir", "flags"});
  if (const json *v = r.find("ro")) rc.ro = ro_params_from_json(*v);
  if (const json *v = r.find("campaign")) rc.campaign = campaign_from_json(*v);
  if (const json *v = r.find("coupling")) rc.coupling = coupling_from_json(*v);
  r.string("output_dir", rc.output_dir);
  if (const json *v = r.find("flags")) {
    detail::ObjectReader f(*v, "flags", {"post_bch", "emit_histograms", "emit_sweep"});
    f.boolean("post_bch", rc.flags.post_bch);
    f.boolean("emit_histograms", rc.flags.emit_histograms);
    f.boolean("emit_sweep", rc.flags.emit_sweep);
  }
  rc.validate();
  return rc;
}

inline RunConfig load_run_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error &e) {
    throw ConfigError("config", std::string("JSON parse error: ") + e.what());
  }
  return run_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Dataset: <stem>.csv with one raw word per row and <stem>.json holding the
// configuration, seed and enrolled references.

inline constexpr std::string_view kDatasetHeader = "chip_id,voltage,sample_index,word_hex";

inline std::string format_voltage(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline json dataset_sidecar(const CampaignDataset &data) {
  json refs = json::array();
  for (std::size_t c = 0; c < data.config.n_chips; ++c)
    for (std::size_t v = 0; v < data.n_voltages(); ++v)
      refs.push_back({{"chip_id", c},
                      {"voltage_v", data.config.voltages[v]},
                      {"word_hex", data.reference(c, v).to_hex()}});
  return {{"format", "wropuf-dataset-1"},
          {"ro", to_json(data.params)},
          {"campaign", to_json(data.config)},
          {"coupling", to_json(data.coupling)},
          {"seed", data.config.master_seed},
          {"word_bit_order", "bit 0 is the most significant bit of the first hex digit"},
          {"references", refs}};
}

inline void write_dataset(const CampaignDataset &data, const std::filesystem::path &csv_path,
                          const std::filesystem::path &json_path) {
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + csv_path.string());
    out << kDatasetHeader << '\n';
    for (std::size_t c = 0; c < data.config.n_chips; ++c)
      for (std::size_t v = 0; v < data.n_voltages(); ++v) {
        const std::string volts = format_voltage(data.config.voltages[v]);
        for (std::size_t t = 0; t < data.config.samples; ++t)
          out << c << ',' << volts << ',' << t << ',' << data.raw(c, v, t).to_hex() << '\n';
      }
    if (!out) throw DataError("write failed for " + csv_path.string());
  }
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw DataError("cannot write " + json_path.string());
  out << dataset_sidecar(data).dump(2) << '\n';
}

namespace detail {

inline std::size_t parse_index(std::string_view s, const std::string &what) {
  if (s.empty()) throw DataError("empty " + what);
  std::size_t v = 0;
  for (char ch : s) {
    if (ch < '0' || ch > '9') throw DataError("invalid " + what + " '" + std::string(s) + "'");
    v = v * 10 + static_cast<std::size_t>(ch - '0');
  }
  return v;
}

inline std::size_t voltage_slot(const CampaignDataset &data, const std::string &text) {
  double volts = 0.0;
  try {
    std::size_t used = 0;
    volts = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception &) {
    throw DataError("invalid voltage '" + text + "'");
  }
  const auto v = data.voltage_index(volts);
  if (!v) throw DataError("voltage " + text + " is not part of the campaign");
  return *v;
}

} // namespace detail

inline CampaignDataset read_dataset(const std::filesystem::path &csv_path,
                                    const std::filesystem::path &json_path) {
  std::ifstream side(json_path);
  if (!side) throw DataError("cannot open " + json_path.string());
  json j;
  try {
    side >> j;
  } catch (const json::parse_error &e) {
    throw DataError(std::string("sidecar parse error: ") + e.what());
  }

  CampaignDataset data;
  try {
    const RoParams params = ro_params_from_json(j.at("ro"));
    const CampaignConfig cfg = campaign_from_json(j.at("campaign"));
    const CouplingMode coupling = coupling_from_json(j.at("coupling"));
    params.validate();
    cfg.validate(params);
    data = CampaignDataset(cfg, params, coupling);
    for (const auto &ref : j.at("references")) {
      const auto c = ref.at("chip_id").get<std::size_t>();
      const auto v = data.voltage_index(ref.at("voltage_v").get<double>());
      if (c >= cfg.n_chips || !v) throw DataError("reference outside the campaign grid");
      data.reference(c, *v) =
          ResponseWord::from_hex(ref.at("word_hex").get<std::string>(), cfg.id_length);
    }
  } catch (const ConfigError &e) {
    throw DataError(std::string("sidecar: ") + e.what());
  } catch (const json::exception &e) {
    throw DataError(std::string("sidecar: ") + e.what());
  } catch (const ArgumentError &e) {
    throw DataError(std::string("sidecar: ") + e.what());
  }

  std::ifstream in(csv_path);
  if (!in) throw DataError("cannot open " + csv_path.string());
  std::string line;
  if (!std::getline(in, line) || line != kDatasetHeader)
    throw DataError("dataset header must be '" + std::string(kDatasetHeader) + "'");

  std::vector<char> seen(data.config.n_chips * data.n_voltages() * data.config.samples, 0);
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string col; std::getline(ss, col, ',');) cols.push_back(col);
    if (cols.size() != 4) throw DataError("row " + std::to_string(row) + ": expected 4 columns");
    const std::size_t c = detail::parse_index(cols[0], "chip_id");
    const std::size_t v = detail::voltage_slot(data, cols[1]);
    const std::size_t t = detail::parse_index(cols[2], "sample_index");
    if (c >= data.config.n_chips || t >= data.config.samples)
      throw DataError("row " + std::to_string(row) + ": index outside the campaign grid");
    char &mark = seen[(c * data.n_voltages() + v) * data.config.samples + t];
    if (mark) throw DataError("row " + std::to_string(row) + ": duplicate cell");
    mark = 1;
    try {
      data.raw(c, v, t) = ResponseWord::from_hex(cols[3], data.config.id_length);
    } catch (const ArgumentError &e) {
      throw DataError("row " + std::to_string(row) + ": " + e.what());
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end() || !data.complete())
    throw DataError("dataset grid is incomplete");
  return data;
}

// ---------------------------------------------------------------------------
// Helper data.

inline json to_json(const bch::HelperData &h) {
  char offset[16];
  std::snprintf(offset, sizeof offset, "%08x", h.offset);
  json j = {{"offset_hex", offset}, {"code", "BCH(31,16,7)"}, {"primpoly", "0x25"}};
  if (h.key_hash) {
    char digest[24];
    std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(*h.key_hash));
    j["key_hash_hex"] = digest;
  } else {
    j["key_hash_hex"] = nullptr;
  }
  return j;
}

inline bch::HelperData helper_from_json(const json &j) {
  try {
    if (j.at("code") != "BCH(31,16,7)" || j.at("primpoly") != "0x25")
      throw DataError("helper data is for a different code");
    bch::HelperData h;
    h.offset = static_cast<std::uint32_t>(std::stoul(j.at("offset_hex").get<std::string>(), nullptr, 16));
    if (h.offset >> bch::kN) throw DataError("helper offset wider than 31 bits");
    const json &kh = j.at("key_hash_hex");
    if (!kh.is_null()) h.key_hash = std::stoull(kh.get<std::string>(), nullptr, 16);
    return h;
  } catch (const json::exception &e) {
    throw DataError(std::string("helper data: ") + e.what());
  } catch (const std::logic_error &e) {
    throw DataError(std::string("helper data: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Reports.

inline json to_json(const HdHistogram &h) {
  return {{"population", h.label()}, {"counts", h.counts}, {"total", h.total}};
}

inline json to_json(const MetricsReport &r) {
  json j = {{"voltage_v", r.voltage},
            {"bch_stage", r.post_bch ? "post" : "pre"},
            {"id_length", r.id_length},
            {"uniqueness_pct", r.uniqueness_pct},
            {"reliability_pct", {{"per_chip", r.reliability_pct}, {"mean", r.reliability_mean_pct}}},
            {"uniformity_pct", {{"per_chip", r.uniformity_pct}, {"mean", r.uniformity_mean_pct}}},
            {"histograms", {{"intra", to_json(r.intra)}, {"inter", to_json(r.inter)}}}};
  if (r.voltage_fit) {
    j["voltage_fit"] = {{"slope", r.voltage_fit->slope},
                        {"intercept", r.voltage_fit->intercept},
                        {"r2", r.voltage_fit->r2},
                        {"abscissa", "abs_delta_v"}};
    json pts = json::array();
    for (const auto &p : r.sweep) pts.push_back({{"delta_v", p.delta_v}, {"shift", p.shift}});
    j["sweep"] = pts;
  } else {
    j["voltage_fit"] = nullptr;
  }
  return j;
}

// One row per distance: distance,intra_count,inter_count.
inline std::string histogram_csv(const HdHistogram &intra, const HdHistogram &inter) {
  std::ostringstream out;
  out << "distance,intra_count,inter_count\n";
  const std::size_t n = std::max(intra.counts.size(), inter.counts.size());
  for (std::size_t d = 0; d < n; ++d)
    out << d << ',' << (d < intra.counts.size() ? intra.counts[d] : 0) << ','
        << (d < inter.counts.size() ? inter.counts[d] : 0) << '\n';
  return out.str();
}

inline std::string sweep_csv(std::span<const SweepPoint> pts) {
  std::ostringstream out;
  out << "delta_v,shift\n";
  char buf[64];
  for (const auto &p : pts) {
    std::snprintf(buf, sizeof buf, "%.10g,%.17g\n", p.delta_v, p.shift);
    out << buf;
  }
  return out.str();
}

} // namespace wropuf
