// wropuf: simulate waveform RO-PUF campaigns, evaluate them, self-test the
// BCH codec and print the area/latency comparison.

#include "wropuf/wropuf.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace wropuf;

namespace {

enum ExitCode : int { kOk = 0, kConfigError = 2, kDataError = 3, kSelftestFailure = 4 };

struct GlobalOptions {
  std::optional<Seed> seed;
  std::string config_path;
  std::string out_dir;
  std::size_t threads = 1;
};

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void print_table(const MetricsReport &r, std::ostream &os) {
  os << "PUF performance at " << format_voltage(r.voltage) << " V, "
     << (r.post_bch ? "post-BCH" : "pre-BCH") << ", L = " << r.id_length << " (in %)\n";
  char line[96];
  std::snprintf(line, sizeof line, "%-12s %10s %8s\n", "", "Simulated", "Ideal");
  os << line;
  std::snprintf(line, sizeof line, "%-12s %10s %8s\n", "Uniformity", pct(r.uniformity_mean_pct).c_str(), "50");
  os << line;
  std::snprintf(line, sizeof line, "%-12s %10s %8s\n", "Reliability", pct(r.reliability_mean_pct).c_str(), "100");
  os << line;
  std::snprintf(line, sizeof line, "%-12s %10s %8s\n", "Uniqueness", pct(r.uniqueness_pct).c_str(), "50");
  os << line;
}

// Writes metrics.json, histograms.csv and, after BCH, per-chip helper files.
void emit_report(const CampaignDataset &data, const fs::path &out, bool post_bch,
                 std::optional<double> volts, bool with_sweep) {
  const double v = volts.value_or(data.params.reference_voltage);
  const MetricsReport report = compute_report(data, post_bch, v, with_sweep);
  fs::create_directories(out);
  write_text(out / "metrics.json", to_json(report).dump(2) + "\n");
  write_text(out / "histograms.csv", histogram_csv(report.intra, report.inter));
  if (post_bch) {
    const auto vi = *data.voltage_index(v);
    fs::create_directories(out / "helpers");
    for (std::size_t c = 0; c < data.config.n_chips; ++c) {
      const auto helper = bch::enroll_id_key(data.reference(c, vi),
                                             helper_seed(data.config.master_seed, c, vi))
                              .helper;
      write_text(out / "helpers" / ("chip_" + std::to_string(c) + ".json"),
                 to_json(helper).dump(2) + "\n");
    }
  }
  print_table(report, std::cout);
  if (report.voltage_fit)
    std::cout << "voltage fit: slope " << report.voltage_fit->slope << " bits/V, R^2 "
              << report.voltage_fit->r2 << "\n";
}

void emit_sweep(const CampaignDataset &data, const fs::path &out, bool post_bch) {
  const double v0 = data.params.reference_voltage;
  const auto pre = voltage_sweep(data, v0, false);
  std::vector<SweepPoint> post;
  if (post_bch) post = voltage_sweep(data, v0, true);
  std::string csv = post_bch ? "delta_v,shift_pre,shift_post\n" : "delta_v,shift_pre\n";
  char buf[96];
  for (std::size_t i = 0; i < pre.size(); ++i) {
    if (post_bch)
      std::snprintf(buf, sizeof buf, "%.10g,%.17g,%.17g\n", pre[i].delta_v, pre[i].shift, post[i].shift);
    else
      std::snprintf(buf, sizeof buf, "%.10g,%.17g\n", pre[i].delta_v, pre[i].shift);
    csv += buf;
  }
  fs::create_directories(out);
  write_text(out / "sweep.csv", csv);
  const auto fit = sweep_fit(pre);
  std::cout << "average HD shift vs |V - " << format_voltage(v0) << " V|: slope " << fit.slope
            << " bits/V, intercept " << fit.intercept << ", R^2 " << fit.r2 << "\n";
}

fs::path dataset_csv(const GlobalOptions &g, const std::string &explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  return fs::path(g.out_dir.empty() ? "out" : g.out_dir) / "dataset.csv";
}

CampaignDataset load(const fs::path &csv) {
  fs::path sidecar = csv;
  sidecar.replace_extension(".json");
  return read_dataset(csv, sidecar);
}

int cmd_simulate(const GlobalOptions &g) {
  if (g.config_path.empty()) throw ConfigError("config", "simulate requires --config <path>");
  RunConfig rc = load_run_config(g.config_path);
  if (g.seed) rc.campaign.master_seed = *g.seed;
  if (!g.out_dir.empty()) rc.output_dir = g.out_dir;
  rc.validate();

  const CampaignDataset data = simulate(rc.campaign, rc.ro, rc.coupling, g.threads);
  const fs::path out = rc.output_dir;
  fs::create_directories(out);
  write_dataset(data, out / "dataset.csv", out / "dataset.json");
  write_text(out / "run_config.json", to_json(rc).dump(2) + "\n");
  std::cout << "wrote " << (out / "dataset.csv").string() << " ("
            << data.config.n_chips * data.n_voltages() * data.config.samples << " words)\n";

  if (rc.flags.emit_histograms) emit_report(data, out, rc.flags.post_bch, std::nullopt, false);
  if (rc.flags.emit_sweep && data.n_voltages() >= 2) emit_sweep(data, out, rc.flags.post_bch);
  return kOk;
}

int cmd_metrics(const GlobalOptions &g, const std::string &dataset, bool post_bch,
                std::optional<double> volts, bool with_sweep) {
  const fs::path csv = dataset_csv(g, dataset);
  const CampaignDataset data = load(csv);
  const fs::path out = g.out_dir.empty() ? csv.parent_path() : fs::path(g.out_dir);
  emit_report(data, out, post_bch, volts, with_sweep && data.n_voltages() >= 2);
  return kOk;
}

int cmd_sweep(const GlobalOptions &g, const std::string &dataset, bool post_bch) {
  const fs::path csv = dataset_csv(g, dataset);
  const CampaignDataset data = load(csv);
  const fs::path out = g.out_dir.empty() ? csv.parent_path() : fs::path(g.out_dir);
  emit_sweep(data, out, post_bch);
  return kOk;
}

int cmd_bch_selftest(const GlobalOptions &g) {
  bool ok = true;
  const auto &code = bch::default_code();
  for (const auto &check : bch::selftest(code, g.seed.value_or(0x5eed))) {
    std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << "\n";
    ok = ok && check.passed;
  }
  return ok ? kOk : kSelftestFailure;
}

int cmd_cost(const CostParams &p, bool as_json) {
  const Cost ours = wro_puf_cost(p);
  const Cost conv = conventional_cost(p);
  if (as_json) {
    const json j = {
        {"bits_required", p.bits_required},
        {"rows",
         {{{"puf", "wRO-PUF"}, {"transistors", ours.transistors}, {"cycles", ours.cycles}},
          {{"puf", "conventional RO-PUF"}, {"transistors", conv.transistors}, {"cycles", conv.cycles}}}}};
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  char line[128];
  std::cout << "Area and clock cycles for a " << p.bits_required << "-bit output\n";
  std::snprintf(line, sizeof line, "%-20s %20s %14s\n", "", "Area (transistors)", "Clock cycles");
  std::cout << line;
  std::snprintf(line, sizeof line, "%-20s %20llu %14llu\n", "wRO-PUF",
                static_cast<unsigned long long>(ours.transistors),
                static_cast<unsigned long long>(ours.cycles));
  std::cout << line;
  std::snprintf(line, sizeof line, "%-20s %20llu %14llu\n", "Conventional RO-PUF",
                static_cast<unsigned long long>(conv.transistors),
                static_cast<unsigned long long>(conv.cycles));
  std::cout << line;
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Waveform ring-oscillator PUF simulator and evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  Seed seed_value = 0;
  auto *seed_opt = app.add_option("--seed", seed_value, "Master seed (overrides the config)");
  app.add_option("--config", g.config_path, "Run configuration (JSON)");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);

  auto *simulate = app.add_subcommand("simulate", "Run a campaign and write the dataset");

  std::string dataset;
  bool post_bch = false;
  std::optional<double> volts;
  bool with_sweep = false;
  auto *metrics = app.add_subcommand("metrics", "Evaluate a dataset");
  metrics->add_option("--dataset", dataset, "Dataset CSV (default <out>/dataset.csv)");
  metrics->add_flag("--post-bch", post_bch, "Reproduce samples through the fuzzy extractor first");
  metrics->add_option("--voltage", volts, "Evaluation voltage (default: reference voltage)");
  metrics->add_flag("--sweep", with_sweep, "Include the voltage fit in the report");

  auto *sweep = app.add_subcommand("sweep", "Average HD shift against the reference voltage");
  sweep->add_option("--dataset", dataset, "Dataset CSV (default <out>/dataset.csv)");
  sweep->add_flag("--post-bch", post_bch, "Also emit post-BCH shifts");

  auto *selftest = app.add_subcommand("bch-selftest", "Verify the BCH(31,16,7) codec");

  CostParams cost;
  bool cost_json = false;
  auto *cost_cmd = app.add_subcommand("cost", "Area and latency comparison");
  cost_cmd->add_option("--bits", cost.bits_required, "Required ID bits");
  cost_cmd->add_option("--bits-per-word", cost.bits_per_word, "Bits captured per RO pair and clock")
      ->check(CLI::PositiveNumber);
  cost_cmd->add_option("--per-ro", cost.transistors_per_ro, "Transistors per RO");
  cost_cmd->add_option("--per-ff", cost.transistors_per_ff, "Transistors per FF");
  cost_cmd->add_option("--per-mux4", cost.transistors_per_mux4, "Transistors per 4-input MUX");
  cost_cmd->add_option("--per-adder", cost.transistors_per_full_adder, "Transistors per full adder");
  cost_cmd->add_option("--counter-bits", cost.counter_bits, "Counter width of the conventional PUF");
  cost_cmd->add_option("--n-ros", cost.n_ros_conventional, "ROs in the conventional PUF");
  cost_cmd->add_option("--mux4-per-mux", cost.mux4_per_mux, "4-input MUXs per MUX tree");
  cost_cmd->add_option("--n-mux", cost.n_mux, "MUX trees in the conventional PUF");
  cost_cmd->add_option("--ro-pairs", cost.ro_pairs, "RO pairs in the wRO-PUF");
  cost_cmd->add_option("--ff-words-per-pair", cost.ff_words_per_pair, "FF words per RO pair");
  cost_cmd->add_flag("--json", cost_json, "Emit JSON instead of a table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (simulate->parsed()) return cmd_simulate(g);
    if (metrics->parsed()) return cmd_metrics(g, dataset, post_bch, volts, with_sweep);
    if (sweep->parsed()) return cmd_sweep(g, dataset, post_bch);
    if (selftest->parsed()) return cmd_bch_selftest(g);
    if (cost_cmd->parsed()) return cmd_cost(cost, cost_json);
  } catch (const ConfigError &e) {
    std::cerr << "error: invalid config: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const ArgumentError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const ModelRangeError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kConfigError;
}
