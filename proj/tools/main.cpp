// mstboot: bootstrap reliability analysis of correlation-network links.
//
// Subcommands: analyze (full pipeline), mst, pmfg, bootstrap, spectrum,
// metrics. All outputs are UTF-8 CSV/JSON files in --out; runs with the same
// configuration and seed are byte-identical regardless of worker count.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/version.hpp>
#include <json.hpp>

#include "mstboot/bootstrap.hpp"
#include "mstboot/correlation.hpp"
#include "mstboot/filtering.hpp"
#include "mstboot/panel.hpp"
#include "mstboot/partitions.hpp"
#include "mstboot/topology.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

// Bad flags, unreadable inputs, failed validation: exit 2. Failures after the
// configuration is accepted exit 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename F>
auto as_config(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

struct Options {
  std::string panel_path;
  std::string sectors_path;
  std::string synth_spec;
  std::string tally_path;
  std::vector<std::string> methods{"row", "pair"};
  std::string method = "pair";
  std::uint32_t replicas = 1000;
  std::uint64_t seed = 0;
  std::string thresholds;
  std::string rule = "strict";
  int workers = -1;
  std::string out_dir = "mstboot_out";
  bool metrics = true;
  std::uint32_t replica_index = 0;
  bool shrink = false;
  double floor = 1e-10;
};

void log_stage(const std::string& message) {
  std::cerr << "[mstboot] " << message << '\n';
}

mstboot::SynthSpec parse_synth_spec(const std::string& text, std::uint64_t seed) {
  mstboot::SynthSpec spec;
  spec.seed = seed;
  std::string::size_type start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(start, end - start);
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("--synthetic: expected key=value, got '" + item + "'");
      }
      const std::string key = item.substr(0, eq);
      const std::string value = item.substr(eq + 1);
      const double v =
          mstboot::parse_double(value, "in --synthetic key '" + key + "'");
      if (key == "n") {
        spec.n_elements = static_cast<std::size_t>(v);
      } else if (key == "sectors") {
        spec.n_sectors = static_cast<std::size_t>(v);
      } else if (key == "T") {
        spec.n_periods = static_cast<std::size_t>(v);
      } else if (key == "m") {
        spec.market_loading = v;
      } else if (key == "s") {
        spec.sector_loading = v;
      } else if (key == "noise") {
        spec.noise_scale = v;
      } else {
        throw ConfigError("--synthetic: unknown key '" + key +
                          "' (expected n, sectors, T, m, s, noise)");
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  spec.validate();
  return spec;
}

struct Input {
  mstboot::ReturnsPanel panel;
  std::optional<mstboot::SectorMap> sectors;
  std::optional<mstboot::SynthSpec> synth;
};

Input load_input(const Options& opt, bool need_sectors) {
  if (opt.panel_path.empty() == opt.synth_spec.empty()) {
    throw ConfigError("exactly one of --panel and --synthetic is required");
  }
  if (!opt.synth_spec.empty()) {
    const auto spec = parse_synth_spec(opt.synth_spec, opt.seed);
    auto [panel, sectors] = mstboot::synthesize_panel(spec);
    log_stage("synthetic panel: n=" + std::to_string(panel.n()) +
              " T=" + std::to_string(panel.periods()) +
              " sectors=" + std::to_string(spec.n_sectors));
    return {std::move(panel), std::move(sectors), spec};
  }
  auto panel = mstboot::load_panel(opt.panel_path);
  log_stage("panel '" + opt.panel_path + "': n=" + std::to_string(panel.n()) +
            " T=" + std::to_string(panel.periods()));
  std::optional<mstboot::SectorMap> sectors;
  if (!opt.sectors_path.empty()) {
    sectors = mstboot::load_sectors(opt.sectors_path);
    sectors->require_covers(panel.elements());
  } else if (need_sectors) {
    throw ConfigError("sector map required");
  }
  return {std::move(panel), std::move(sectors), std::nullopt};
}

std::vector<std::uint32_t> parse_thresholds(const std::string& text,
                                            std::uint32_t replicas) {
  if (text.empty()) return mstboot::default_threshold_grid(replicas);

  const auto parse_u32 = [](const std::string& s) {
    std::uint32_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw ConfigError("--thresholds: bad integer '" + s + "'");
    }
    return v;
  };

  std::vector<std::uint32_t> grid;
  if (text.find(':') != std::string::npos) {
    // hi:lo:step, descending inclusive range
    std::vector<std::string> parts;
    std::string::size_type start = 0;
    while (true) {
      auto pos = text.find(':', start);
      if (pos == std::string::npos) {
        parts.push_back(text.substr(start));
        break;
      }
      parts.push_back(text.substr(start, pos - start));
      start = pos + 1;
    }
    if (parts.size() != 3) throw ConfigError("--thresholds: expected hi:lo:step");
    const auto hi = parse_u32(parts[0]);
    const auto lo = parse_u32(parts[1]);
    const auto step = parse_u32(parts[2]);
    if (step == 0 || hi < lo) {
      throw ConfigError("--thresholds: need hi >= lo and step >= 1");
    }
    for (std::uint32_t t = hi;; t -= step) {
      grid.push_back(t);
      if (t < lo + step) break;
    }
  } else {
    std::string::size_type start = 0;
    while (start <= text.size()) {
      auto end = text.find(',', start);
      if (end == std::string::npos) end = text.size();
      const std::string item = text.substr(start, end - start);
      if (!item.empty()) grid.push_back(parse_u32(item));
      if (end == text.size()) break;
      start = end + 1;
    }
    std::sort(grid.begin(), grid.end(), std::greater<>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }
  if (grid.empty()) throw ConfigError("--thresholds: empty grid");
  for (const auto t : grid) {
    if (t > replicas) {
      throw ConfigError("--thresholds: " + std::to_string(t) +
                        " exceeds replica count " + std::to_string(replicas));
    }
  }
  return grid;
}

int resolve_workers(int flag_value) {
  if (flag_value >= 0) return flag_value;
  if (const char* env = std::getenv("MSTBOOT_WORKERS")) {
    const std::string s(env);
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 0) {
      throw ConfigError("MSTBOOT_WORKERS: bad value '" + s + "'");
    }
    return v;
  }
  return 0;  // all available
}

std::vector<mstboot::BootstrapMethod> parse_methods(
    const std::vector<std::string>& names) {
  std::vector<mstboot::BootstrapMethod> methods;
  for (const auto& name : names) {
    const auto method = mstboot::bootstrap_method_from_string(name);
    if (std::find(methods.begin(), methods.end(), method) == methods.end()) {
      methods.push_back(method);
    }
  }
  if (methods.empty()) throw ConfigError("--methods: need at least one method");
  return methods;
}

json config_json(const Options& opt, const Input& input,
                 const std::vector<std::uint32_t>& thresholds) {
  json config;
  config["out"] = opt.out_dir;
  config["seed"] = opt.seed;
  config["workers"] = opt.workers;
  config["rule"] = opt.rule;
  config["replicas"] = opt.replicas;
  config["thresholds"] = thresholds;
  if (input.synth) {
    config["synthetic"] = {{"n", input.synth->n_elements},
                           {"sectors", input.synth->n_sectors},
                           {"T", input.synth->n_periods},
                           {"m", input.synth->market_loading},
                           {"s", input.synth->sector_loading},
                           {"noise", input.synth->noise_scale},
                           {"seed", input.synth->seed}};
  } else {
    config["panel"] = opt.panel_path;
    if (!opt.sectors_path.empty()) config["sectors"] = opt.sectors_path;
  }
  return config;
}

void write_manifest(const std::string& command, const json& config,
                    const std::string& out_dir) {
  json manifest;
  manifest["tool"] = {{"name", "mstboot"}, {"version", kVersion}};
  manifest["versions"] = {
      {"compiler", __VERSION__},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                    std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"boost", BOOST_LIB_VERSION},
  };
  manifest["command"] = command;
  manifest["config"] = config;
  std::ofstream out(out_dir + "/manifest.json");
  if (!out) throw mstboot::Error("cannot write manifest.json in '" + out_dir + "'");
  out << manifest.dump(2) << '\n';
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + out_dir +
                      "': " + ec.message());
  }
}

std::string out_path(const Options& opt, const std::string& name) {
  return (fs::path(opt.out_dir) / name).string();
}

int cmd_analyze(const Options& opt) {
  const Input input = as_config([&] { return load_input(opt, opt.metrics); });
  const auto methods = as_config([&] { return parse_methods(opt.methods); });
  const auto thresholds =
      as_config([&] { return parse_thresholds(opt.thresholds, opt.replicas); });
  const auto rule =
      as_config([&] { return mstboot::threshold_rule_from_string(opt.rule); });
  const int workers = as_config([&] { return resolve_workers(opt.workers); });
  as_config([&] { ensure_out_dir(opt.out_dir); });

  json config = config_json(opt, input, thresholds);
  config["methods"] = opt.methods;
  config["metrics"] = opt.metrics;
  write_manifest("analyze", config, opt.out_dir);

  const auto& panel = input.panel;
  if (input.synth) {
    mstboot::write_panel(panel, out_path(opt, "panel.csv"));
    mstboot::write_sectors(*input.sectors, out_path(opt, "sectors.csv"));
  }

  log_stage("correlation");
  const auto corr = mstboot::pearson(panel, workers);
  mstboot::write_correlation_csv(corr, panel.elements(),
                                 out_path(opt, "correlation.csv"));

  log_stage("mst");
  const auto tree = mstboot::mst(mstboot::to_distance(corr));
  mstboot::write_edges_csv(tree, panel.elements(), out_path(opt, "mst_edges.csv"));
  mstboot::write_network_summary_json(tree, out_path(opt, "mst_summary.json"));

  log_stage("pmfg");
  const auto planar = mstboot::pmfg(corr);
  mstboot::write_edges_csv(planar, panel.elements(),
                           out_path(opt, "pmfg_edges.csv"));
  mstboot::write_network_summary_json(planar, out_path(opt, "pmfg_summary.json"));

  const mstboot::rng::ReplicaSeedPolicy policy{opt.seed};
  std::vector<mstboot::BootstrapTally> tallies;
  for (const auto method : methods) {
    log_stage("bootstrap " + to_string(method) +
              ": B=" + std::to_string(opt.replicas));
    tallies.push_back(
        mstboot::run_bootstrap(panel, method, opt.replicas, policy, workers));
    const auto& tally = tallies.back();
    mstboot::write_tally_csv(tally, panel.elements(),
                             out_path(opt, "tally_" + to_string(method) + ".csv"));
    log_stage("bootstrap " + to_string(method) + ": " +
              std::to_string(mstboot::distinct_link_count(tally)) +
              " distinct links out of " +
              std::to_string(panel.n() * (panel.n() - 1) / 2));
  }

  std::vector<const mstboot::BootstrapTally*> tally_ptrs;
  for (const auto& tally : tallies) tally_ptrs.push_back(&tally);

  log_stage("figures");
  mstboot::write_histogram_csv(tally_ptrs, out_path(opt, "histogram.csv"));
  mstboot::write_threshold_scan_csv(tally_ptrs, thresholds, rule,
                                    out_path(opt, "threshold_scan.csv"));
  mstboot::write_mst_overlap_csv(tally_ptrs, tree, thresholds, rule,
                                 out_path(opt, "mst_overlap.csv"));
  mstboot::write_cliques_csv(tally_ptrs, planar, thresholds, rule,
                             out_path(opt, "cliques.csv"));

  if (opt.metrics) {
    log_stage("metrics");
    std::vector<std::tuple<mstboot::BootstrapMethod, mstboot::SectorLevel,
                           std::vector<mstboot::MetricRow>>>
        curves;
    for (std::size_t k = 0; k < methods.size(); ++k) {
      for (const auto level :
           {mstboot::SectorLevel::Sector, mstboot::SectorLevel::Subsector}) {
        curves.emplace_back(methods[k], level,
                            mstboot::metric_curves(tallies[k], *input.sectors,
                                                   panel.elements(), level,
                                                   thresholds, rule));
      }
    }
    mstboot::write_metrics_csv(curves, out_path(opt, "metrics.csv"));

    if (methods.size() == 2) {
      log_stage("scatter + association test");
      const auto& row_tally =
          methods[0] == mstboot::BootstrapMethod::Row ? tallies[0] : tallies[1];
      const auto& pair_tally =
          methods[0] == mstboot::BootstrapMethod::Row ? tallies[1] : tallies[0];
      const auto points = mstboot::scatter(row_tally, pair_tally, *input.sectors,
                                           panel.elements());
      mstboot::write_scatter_csv(points, panel.elements(),
                                 out_path(opt, "scatter.csv"));
      const auto test = mstboot::sector_association_test(points.points);
      mstboot::write_association_json(test, out_path(opt, "association_test.json"));
    } else {
      log_stage("scatter skipped: needs both methods");
    }
  }
  log_stage("done: " + opt.out_dir);
  return 0;
}

int cmd_mst(const Options& opt) {
  const Input input = as_config([&] { return load_input(opt, false); });
  const int workers = as_config([&] { return resolve_workers(opt.workers); });
  as_config([&] { ensure_out_dir(opt.out_dir); });
  write_manifest("mst", config_json(opt, input, {}), opt.out_dir);
  const auto corr = mstboot::pearson(input.panel, workers);
  const auto tree = mstboot::mst(mstboot::to_distance(corr));
  mstboot::write_edges_csv(tree, input.panel.elements(),
                           out_path(opt, "mst_edges.csv"));
  mstboot::write_network_summary_json(tree, out_path(opt, "mst_summary.json"));
  log_stage("mst: " + std::to_string(tree.edges.size()) + " edges");
  return 0;
}

int cmd_pmfg(const Options& opt) {
  const Input input = as_config([&] { return load_input(opt, false); });
  const int workers = as_config([&] { return resolve_workers(opt.workers); });
  as_config([&] { ensure_out_dir(opt.out_dir); });
  write_manifest("pmfg", config_json(opt, input, {}), opt.out_dir);
  const auto corr = mstboot::pearson(input.panel, workers);
  const auto planar = mstboot::pmfg(corr);
  mstboot::write_edges_csv(planar, input.panel.elements(),
                           out_path(opt, "pmfg_edges.csv"));
  mstboot::write_network_summary_json(planar, out_path(opt, "pmfg_summary.json"));
  log_stage("pmfg: " + std::to_string(planar.edges.size()) + " edges");
  return 0;
}

int cmd_bootstrap(const Options& opt) {
  const Input input = as_config([&] { return load_input(opt, false); });
  const auto method =
      as_config([&] { return mstboot::bootstrap_method_from_string(opt.method); });
  const int workers = as_config([&] { return resolve_workers(opt.workers); });
  as_config([&] { ensure_out_dir(opt.out_dir); });
  json config = config_json(opt, input, {});
  config["method"] = opt.method;
  write_manifest("bootstrap", config, opt.out_dir);

  log_stage("bootstrap " + opt.method + ": B=" + std::to_string(opt.replicas));
  const auto tally = mstboot::run_bootstrap(
      input.panel, method, opt.replicas, mstboot::rng::ReplicaSeedPolicy{opt.seed},
      workers);
  mstboot::write_tally_csv(tally, input.panel.elements(),
                           out_path(opt, "tally_" + opt.method + ".csv"));
  log_stage("bootstrap: " + std::to_string(mstboot::distinct_link_count(tally)) +
            " distinct links");
  return 0;
}

int cmd_spectrum(const Options& opt) {
  as_config([&] {
    if (mstboot::bootstrap_method_from_string(opt.method) !=
        mstboot::BootstrapMethod::Pair) {
      throw ConfigError(
          "spectrum: row replicas are PSD by construction; use --method pair");
    }
  });
  const Input input = as_config([&] { return load_input(opt, false); });
  as_config([&] { ensure_out_dir(opt.out_dir); });
  json config = config_json(opt, input, {});
  config["method"] = opt.method;
  config["replica_index"] = opt.replica_index;
  config["shrink"] = opt.shrink;
  config["floor"] = opt.floor;
  write_manifest("spectrum", config, opt.out_dir);

  const mstboot::rng::ReplicaSeedPolicy policy{opt.seed};
  auto corr =
      mstboot::pair_replica(input.panel, policy.replica_seed(opt.replica_index));
  double alpha = 0.0;
  if (opt.shrink) {
    auto result = mstboot::shrink_to_psd(corr, opt.floor);
    corr = std::move(result.matrix);
    alpha = result.alpha;
  }
  const auto spec = mstboot::spectrum(corr);

  std::ofstream out(out_path(opt, "spectrum.csv"));
  if (!out) throw mstboot::Error("cannot write spectrum.csv");
  out << "rank,eigenvalue\n";
  for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
    out << k << ',' << mstboot::format_double17(spec.eigenvalues[k]) << '\n';
  }

  json summary{{"n", spec.eigenvalues.size()},
               {"negative_count", spec.negative_count()},
               {"min_eigenvalue", spec.min()},
               {"replica_index", opt.replica_index}};
  if (opt.shrink) summary["alpha"] = alpha;
  std::ofstream sout(out_path(opt, "spectrum_summary.json"));
  if (!sout) throw mstboot::Error("cannot write spectrum_summary.json");
  sout << summary.dump(2) << '\n';

  log_stage("spectrum: " + std::to_string(spec.negative_count()) +
            " negative eigenvalues, min " + mstboot::format_double(spec.min()));
  return 0;
}

int cmd_metrics(const Options& opt) {
  const Input input = as_config([&] { return load_input(opt, true); });
  const auto tally = as_config([&] {
    if (opt.tally_path.empty()) throw ConfigError("metrics: --tally is required");
    return mstboot::read_tally_csv(opt.tally_path, input.panel.elements());
  });
  const auto thresholds = as_config(
      [&] { return parse_thresholds(opt.thresholds, tally.replicas); });
  const auto rule =
      as_config([&] { return mstboot::threshold_rule_from_string(opt.rule); });
  as_config([&] { ensure_out_dir(opt.out_dir); });
  json config = config_json(opt, input, thresholds);
  config["tally"] = opt.tally_path;
  write_manifest("metrics", config, opt.out_dir);

  std::vector<std::tuple<mstboot::BootstrapMethod, mstboot::SectorLevel,
                         std::vector<mstboot::MetricRow>>>
      curves;
  for (const auto level :
       {mstboot::SectorLevel::Sector, mstboot::SectorLevel::Subsector}) {
    curves.emplace_back(tally.method, level,
                        mstboot::metric_curves(tally, *input.sectors,
                                               input.panel.elements(), level,
                                               thresholds, rule));
  }
  mstboot::write_metrics_csv(curves, out_path(opt, "metrics.csv"));
  log_stage("metrics: " + std::to_string(thresholds.size()) + " thresholds");
  return 0;
}

void add_input_options(CLI::App* cmd, Options& opt, bool with_sectors) {
  cmd->add_option("--panel", opt.panel_path, "Wide CSV returns panel");
  cmd->add_option("--synthetic", opt.synth_spec,
                  "Synthetic panel spec, e.g. n=50,sectors=5,T=250,m=0.3,s=0.5");
  if (with_sectors) {
    cmd->add_option("--sectors", opt.sectors_path,
                    "Sector CSV (element,sector,subsector)");
  }
  cmd->add_option("--seed", opt.seed, "Master seed (panel synthesis + bootstrap)");
  cmd->add_option("--out", opt.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--workers", opt.workers,
                  "Worker threads (0 = all; default from MSTBOOT_WORKERS)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bootstrap link reliability for correlation-based networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Options opt;

  auto* analyze = app.add_subcommand("analyze", "Run the full pipeline");
  add_input_options(analyze, opt, true);
  analyze->add_option("--methods", opt.methods, "Bootstrap methods (row,pair)")
      ->delimiter(',')
      ->capture_default_str();
  analyze->add_option("--replicas", opt.replicas, "Bootstrap replica count B")
      ->capture_default_str();
  analyze->add_option("--thresholds", opt.thresholds,
                      "Threshold grid: list t1,t2,... or range hi:lo:step "
                      "(default: B-step down to step, step=B/50)");
  analyze->add_option("--rule", opt.rule, "Threshold comparison: strict|inclusive")
      ->capture_default_str();
  analyze->add_flag("--metrics,!--no-metrics", opt.metrics,
                    "Partition metrics, scatter and association test (default on)");

  auto* mst_cmd = app.add_subcommand("mst", "Original-panel minimum spanning tree");
  add_input_options(mst_cmd, opt, false);

  auto* pmfg_cmd =
      app.add_subcommand("pmfg", "Original-panel planar maximally filtered graph");
  add_input_options(pmfg_cmd, opt, false);

  auto* bootstrap_cmd =
      app.add_subcommand("bootstrap", "Bootstrap tally for one method");
  add_input_options(bootstrap_cmd, opt, false);
  bootstrap_cmd->add_option("--method", opt.method, "row|pair")
      ->capture_default_str();
  bootstrap_cmd->add_option("--replicas", opt.replicas, "Bootstrap replica count B")
      ->capture_default_str();

  auto* spectrum_cmd =
      app.add_subcommand("spectrum", "Eigenvalue spectrum of one pair replica");
  add_input_options(spectrum_cmd, opt, false);
  spectrum_cmd->add_option("--method", opt.method, "Must be pair")
      ->capture_default_str();
  spectrum_cmd->add_option("--replica-index", opt.replica_index,
                           "Replica to diagnose")
      ->capture_default_str();
  spectrum_cmd->add_flag("--shrink", opt.shrink,
                         "Shrink the replica to PSD before the spectrum");
  spectrum_cmd->add_option("--floor", opt.floor, "Shrinkage eigenvalue floor")
      ->capture_default_str();

  auto* metrics_cmd =
      app.add_subcommand("metrics", "ARI/AWI curves from a saved tally CSV");
  add_input_options(metrics_cmd, opt, true);
  metrics_cmd->add_option("--tally", opt.tally_path, "Tally CSV from `bootstrap`");
  metrics_cmd->add_option("--thresholds", opt.thresholds,
                          "Threshold grid (see analyze)");
  metrics_cmd->add_option("--rule", opt.rule,
                          "Threshold comparison: strict|inclusive")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(opt);
    if (app.got_subcommand(mst_cmd)) return cmd_mst(opt);
    if (app.got_subcommand(pmfg_cmd)) return cmd_pmfg(opt);
    if (app.got_subcommand(bootstrap_cmd)) return cmd_bootstrap(opt);
    if (app.got_subcommand(spectrum_cmd)) return cmd_spectrum(opt);
    if (app.got_subcommand(metrics_cmd)) return cmd_metrics(opt);
  } catch (const ConfigError& e) {
    std::cerr << "mstboot " << stage << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mstboot " << stage << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
