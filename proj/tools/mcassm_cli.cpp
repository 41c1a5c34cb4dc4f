// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
//
// Command-line front end: channel ingestion, aggregation-matrix optimization,
// Monte-Carlo simulation, union-bound evaluation and batch sweeps, all with
// machine-readable CSV/JSON artifacts.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mcassm/analysis.hpp"
#include "mcassm/channel_io.hpp"
#include "mcassm/serialize.hpp"
#include "mcassm/simulate.hpp"

namespace {

using Scalar = double;
using json = nlohmann::json;

struct RunConfig {
  std::string scenario_path;
  std::string link_id;
  bool normalize = false;

  long long synth_paths = 6;
  long long synth_seed = 1;
  double synth_decay = 0.45;
  long long synth_links = 50;

  long long nt = 16, nr = 16;
  double dt = 0.5, dr = 0.5;
  long long ns = 4, nsa = 2, L = 4, M = 16;
  std::string family = "qam";

  std::string snr = "0:2:20";
  long long symbols = 100000;
  long long seed = 1;
  std::string baseline = "mca";
  std::string out;
  std::string per_link_out;
  std::string iota_grid;
  bool as_json = false;
  long long workers = 1;
  std::string dump_effective;
  std::string config_file;
};

std::string iso_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

mcassm::Vec<Scalar> parse_grid(const std::string& spec, bool log_space = false) {
  // start:step:stop (linear) or lo:hi:npts (log), both colon separated
  double a = 0, b = 0, c = 0;
  char c1 = 0, c2 = 0;
  std::istringstream ss(spec);
  if (!(ss >> a >> c1 >> b >> c2 >> c) || c1 != ':' || c2 != ':')
    throw std::invalid_argument("cannot parse grid '" + spec + "' (expected a:b:c)");
  std::vector<double> vals;
  if (log_space) {
    const int n = static_cast<int>(c);
    if (n < 1 || a <= 0 || b <= 0) throw std::invalid_argument("bad log grid '" + spec + "'");
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      vals.push_back(std::exp(std::log(a) + t * (std::log(b) - std::log(a))));
    }
  } else {
    if (b <= 0) throw std::invalid_argument("bad grid step in '" + spec + "'");
    for (double v = a; v <= c + 1e-9; v += b) vals.push_back(v);
  }
  mcassm::Vec<Scalar> out(static_cast<mcassm::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) out(static_cast<mcassm::Index>(i)) = vals[i];
  return out;
}

mcassm::Constellation<Scalar> make_constellation(const RunConfig& cfg) {
  using mcassm::ModFamily;
  if (cfg.family == "psk") return mcassm::gen_constellation<Scalar>(ModFamily::Psk, cfg.M);
  if (cfg.family == "qam") return mcassm::gen_constellation<Scalar>(ModFamily::SquareQam, cfg.M);
  if (cfg.family == "qamr") return mcassm::gen_constellation<Scalar>(ModFamily::RectQam, cfg.M);
  // also accept combined tags like psk16 / qam8r
  return mcassm::parse_constellation_tag<Scalar>(cfg.family);
}

mcassm::ArrayConfig<Scalar> make_array(const RunConfig& cfg) {
  mcassm::ArrayConfig<Scalar> a;
  a.n_tx = cfg.nt;
  a.n_rx = cfg.nr;
  a.d_tx = cfg.dt;
  a.d_rx = cfg.dr;
  a.validate();
  return a;
}

std::vector<mcassm::ChannelScenario<Scalar>> load_scenarios(const RunConfig& cfg) {
  const auto array = make_array(cfg);
  mcassm::LoadOptions opts;
  opts.normalize = cfg.normalize;
  if (!cfg.scenario_path.empty()) {
    if (cfg.scenario_path == "-") return mcassm::load_link_records<Scalar>(std::cin, array, opts);
    std::ifstream in(cfg.scenario_path);
    if (!in) throw std::runtime_error("cannot open scenario file '" + cfg.scenario_path + "'");
    if (cfg.scenario_path.size() > 5 &&
        cfg.scenario_path.substr(cfg.scenario_path.size() - 5) == ".json") {
      json j;
      in >> j;
      return mcassm::load_link_records_json<Scalar>(j, array, opts);
    }
    return mcassm::load_link_records<Scalar>(in, array, opts);
  }
  // synthetic fallback
  mcassm::SynthProfile<Scalar> prof;
  prof.decay = cfg.synth_decay;
  std::vector<mcassm::ChannelScenario<Scalar>> out;
  out.push_back(mcassm::synth_scenario<Scalar>(cfg.synth_paths,
                                               static_cast<std::uint64_t>(cfg.synth_seed), prof,
                                               array));
  return out;
}

mcassm::ChannelScenario<Scalar> pick_link(const RunConfig& cfg) {
  auto all = load_scenarios(cfg);
  if (cfg.link_id.empty()) return all.front();
  for (auto& s : all)
    if (s.link_id == cfg.link_id) return s;
  throw std::runtime_error("link '" + cfg.link_id + "' not found in scenario source");
}

mcassm::Baseline parse_baseline(const std::string& s) {
  if (s == "mca") return mcassm::Baseline::Mca;
  if (s == "ssm") return mcassm::Baseline::Ssm;
  if (s == "gssm") return mcassm::Baseline::Gssm;
  throw std::invalid_argument("unknown baseline '" + s + "' (mca|ssm|gssm)");
}

std::string canonical_string(const RunConfig& cfg, const std::string& cmd) {
  std::ostringstream os;
  os.precision(17);
  os << "cmd=" << cmd << ";scenario=" << cfg.scenario_path << ";link=" << cfg.link_id
     << ";normalize=" << cfg.normalize << ";synth=" << cfg.synth_paths << '/' << cfg.synth_seed
     << '/' << cfg.synth_decay << '/' << cfg.synth_links << ";nt=" << cfg.nt << ";nr=" << cfg.nr
     << ";dt=" << cfg.dt << ";dr=" << cfg.dr << ";ns=" << cfg.ns << ";nsa=" << cfg.nsa
     << ";L=" << cfg.L << ";M=" << cfg.M << ";family=" << cfg.family << ";snr=" << cfg.snr
     << ";symbols=" << cfg.symbols << ";seed=" << cfg.seed << ";baseline=" << cfg.baseline
     << ";iota_grid=" << cfg.iota_grid;
  return os.str();
}

// Streams the artifact to --out or stdout.
class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void maybe_dump_effective(const RunConfig& cfg, const mcassm::EffectiveChannel<Scalar>& eff) {
  if (cfg.dump_effective.empty()) return;
  std::ofstream out(cfg.dump_effective);
  if (!out) throw std::runtime_error("cannot open '" + cfg.dump_effective + "'");
  out << mcassm::to_json(eff).dump(2) << "\n";
}

void warn_if_ridged(const mcassm::EffectiveChannel<Scalar>& eff) {
  if (eff.ridge_applied)
    std::cerr << "warning: noise covariance near-singular (close AoAs); "
                 "ridge regularization applied\n";
}

int cmd_optimize(const RunConfig& cfg) {
  const auto scenario = pick_link(cfg);
  const auto eff = mcassm::effective_channel(scenario, std::min<mcassm::Index>(cfg.ns, scenario.n_paths()));
  warn_if_ridged(eff);
  maybe_dump_effective(cfg, eff);
  const auto constellation = make_constellation(cfg);
  const auto book = mcassm::design_upsilon<Scalar>(cfg.L, cfg.nsa, eff.n_s);
  const auto res = mcassm::optimize_design(eff, book, constellation);

  std::cout << "lambda =";
  for (mcassm::Index i = 0; i < eff.eigvals.size(); ++i) std::cout << ' ' << eff.eigvals(i);
  std::cout << "\niota_opt =";
  for (mcassm::Index i = 0; i < res.design.iota.size(); ++i)
    std::cout << ' ' << res.design.iota(i);
  std::cout << "\nmin_ed = " << res.design.min_ed << "\n";

  json j = mcassm::to_json(res);
  j["generated"] = iso_now();
  j["config"] = mcassm::config_digest(canonical_string(cfg, "optimize"));
  j["lambda"] = mcassm::vec_json(eff.eigvals);
  OutputSink sink(cfg.out);
  sink.stream() << j.dump(2) << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg) {
  const auto scenario = pick_link(cfg);
  const auto eff = mcassm::effective_channel(scenario, std::min<mcassm::Index>(cfg.ns, scenario.n_paths()));
  warn_if_ridged(eff);
  maybe_dump_effective(cfg, eff);
  const auto constellation = make_constellation(cfg);

  mcassm::LinkConfig<Scalar> lc;
  lc.design = mcassm::design_for_baseline(eff, constellation, parse_baseline(cfg.baseline), cfg.L,
                                          cfg.nsa);
  lc.effective = eff;
  lc.constellation = constellation;
  lc.snr_db_list = parse_grid(cfg.snr);
  lc.n_symbols_per_point = cfg.symbols;
  lc.seed = static_cast<std::uint64_t>(cfg.seed);
  lc.workers = static_cast<int>(cfg.workers);
  const auto result = mcassm::run_monte_carlo(lc);

  const std::string digest = mcassm::config_digest(canonical_string(cfg, "simulate"));
  OutputSink sink(cfg.out);
  if (cfg.as_json) {
    json pts = json::array();
    for (const auto& p : result.points)
      pts.push_back({{"snr_db", p.snr_db},
                     {"bits", p.bits_sent},
                     {"errors", p.bit_errors},
                     {"ber", p.ber}});
    json j{{"generated", iso_now()}, {"config", digest}, {"points", std::move(pts)}};
    sink.stream() << j.dump(2) << "\n";
  } else {
    mcassm::write_artifact_header(sink.stream(), iso_now(), digest, "simulate");
    mcassm::write_sim_csv(sink.stream(), result);
  }
  return 0;
}

int cmd_abep(const RunConfig& cfg) {
  const auto scenario = pick_link(cfg);
  const auto eff = mcassm::effective_channel(scenario, std::min<mcassm::Index>(cfg.ns, scenario.n_paths()));
  warn_if_ridged(eff);
  maybe_dump_effective(cfg, eff);
  const auto constellation = make_constellation(cfg);
  const auto design = mcassm::design_for_baseline(eff, constellation, parse_baseline(cfg.baseline),
                                                  cfg.L, cfg.nsa);
  const auto curve = mcassm::uub_curve(design, eff, constellation, parse_grid(cfg.snr));

  const std::string digest = mcassm::config_digest(canonical_string(cfg, "abep"));
  OutputSink sink(cfg.out);
  if (cfg.as_json) {
    json j{{"generated", iso_now()},
           {"config", digest},
           {"snr_db", mcassm::vec_json(curve.snr_db)},
           {"uub", mcassm::vec_json(curve.uub)}};
    sink.stream() << j.dump(2) << "\n";
  } else {
    mcassm::write_artifact_header(sink.stream(), iso_now(), digest, "abep");
    mcassm::write_abep_csv(sink.stream(), curve);
  }
  return 0;
}

int cmd_ed_sweep(const RunConfig& cfg) {
  const auto scenario = pick_link(cfg);
  const auto eff = mcassm::effective_channel(scenario, std::min<mcassm::Index>(cfg.ns, scenario.n_paths()));
  warn_if_ridged(eff);
  const auto constellation = make_constellation(cfg);
  const auto book = mcassm::design_upsilon<Scalar>(cfg.L, cfg.nsa, eff.n_s);

  mcassm::Vec<Scalar> grid;
  if (!cfg.iota_grid.empty()) {
    grid = parse_grid(cfg.iota_grid, /*log_space=*/true);
  } else {
    const Scalar center = eff.eigvals(0) / eff.eigvals(1);
    std::ostringstream spec;
    spec.precision(17);
    spec << center * 1e-2 << ':' << center * 1e2 << ":81";
    grid = parse_grid(spec.str(), true);
  }
  const auto pts = mcassm::ed_sweep(eff, book, constellation, grid);

  const std::string digest = mcassm::config_digest(canonical_string(cfg, "ed-sweep"));
  OutputSink sink(cfg.out);
  if (cfg.as_json) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back({{"iota2", p.iota2}, {"min_ed", p.min_ed}});
    json j{{"generated", iso_now()}, {"config", digest}, {"points", std::move(arr)}};
    sink.stream() << j.dump(2) << "\n";
  } else {
    mcassm::write_artifact_header(sink.stream(), iso_now(), digest, "ed-sweep");
    mcassm::write_ed_sweep_csv(sink.stream(), pts);
  }
  return 0;
}

int cmd_scenario_sweep(const RunConfig& cfg) {
  std::vector<mcassm::ChannelScenario<Scalar>> scenarios;
  if (!cfg.scenario_path.empty()) {
    scenarios = load_scenarios(cfg);
  } else {
    const auto array = make_array(cfg);
    mcassm::SynthProfile<Scalar> prof;
    prof.decay = cfg.synth_decay;
    for (long long i = 0; i < cfg.synth_links; ++i)
      scenarios.push_back(mcassm::synth_scenario<Scalar>(
          cfg.synth_paths, static_cast<std::uint64_t>(cfg.synth_seed + i), prof, array));
  }
  const auto constellation = make_constellation(cfg);
  mcassm::SweepParams<Scalar> params;
  params.n_s = cfg.ns;
  params.n_sa = cfg.nsa;
  params.l_count = cfg.L;
  params.baseline = parse_baseline(cfg.baseline);
  params.snr_db = parse_grid(cfg.snr);
  const auto res = mcassm::scenario_sweep(scenarios, constellation, params);

  if (!res.failed_links.empty())
    std::cerr << "warning: " << res.failed_links.size()
              << " link(s) excluded (degenerate spectrum or topology mismatch)\n";

  const std::string digest = mcassm::config_digest(canonical_string(cfg, "scenario-sweep"));
  OutputSink sink(cfg.out);
  if (cfg.as_json) {
    json links = json::array();
    for (const auto& lk : res.links)
      links.push_back({{"link_id", lk.link_id}, {"uub", mcassm::vec_json(lk.uub)}});
    json j{{"generated", iso_now()},
           {"config", digest},
           {"snr_db", mcassm::vec_json(res.snr_db)},
           {"uub_mean", mcassm::vec_json(res.mean)},
           {"uub_median", mcassm::vec_json(res.median)},
           {"uub_max", mcassm::vec_json(res.max)},
           {"failed_links", res.failed_links},
           {"links", std::move(links)}};
    sink.stream() << j.dump(2) << "\n";
  } else {
    mcassm::write_artifact_header(sink.stream(), iso_now(), digest, "scenario-sweep");
    mcassm::write_sweep_aggregate_csv(sink.stream(), res);
    if (!cfg.per_link_out.empty()) {
      std::ofstream lout(cfg.per_link_out);
      if (!lout) throw std::runtime_error("cannot open '" + cfg.per_link_out + "'");
      mcassm::write_artifact_header(lout, iso_now(), digest, "scenario-sweep");
      mcassm::write_sweep_links_csv(lout, res);
    }
  }
  return 0;
}

int cmd_synth(const RunConfig& cfg) {
  const auto array = make_array(cfg);
  mcassm::SynthProfile<Scalar> prof;
  prof.decay = cfg.synth_decay;
  std::vector<mcassm::ChannelScenario<Scalar>> links;
  for (long long i = 0; i < cfg.synth_links; ++i)
    links.push_back(mcassm::synth_scenario<Scalar>(
        cfg.synth_paths, static_cast<std::uint64_t>(cfg.synth_seed + i), prof, array));
  OutputSink sink(cfg.out);
  mcassm::write_link_records(sink.stream(), links);
  return 0;
}

void apply_json_config(const json& j, CLI::App& app, RunConfig& cfg) {
  const auto set_if_unset = [&](const char* flag, auto& member) {
    const CLI::Option* opt = app.get_option_no_throw(flag);
    std::string key = flag;
    key.erase(0, key.find_first_not_of('-'));
    if (!j.contains(key)) return;
    if (opt == nullptr || opt->count() == 0) j.at(key).get_to(member);
  };
  set_if_unset("--scenario", cfg.scenario_path);
  set_if_unset("--link", cfg.link_id);
  set_if_unset("--nt", cfg.nt);
  set_if_unset("--nr", cfg.nr);
  set_if_unset("--dt", cfg.dt);
  set_if_unset("--dr", cfg.dr);
  set_if_unset("--ns", cfg.ns);
  set_if_unset("--nsa", cfg.nsa);
  set_if_unset("--snr", cfg.snr);
  set_if_unset("--symbols", cfg.symbols);
  set_if_unset("--seed", cfg.seed);
  set_if_unset("--baseline", cfg.baseline);
  set_if_unset("--family", cfg.family);
  set_if_unset("--workers", cfg.workers);
  const CLI::Option* lopt = app.get_option_no_throw("-L");
  if (j.contains("L") && (lopt == nullptr || lopt->count() == 0)) j.at("L").get_to(cfg.L);
  const CLI::Option* mopt = app.get_option_no_throw("-M");
  if (j.contains("M") && (mopt == nullptr || mopt->count() == 0)) j.at("M").get_to(cfg.M);
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--scenario", cfg.scenario_path, "channel record CSV/JSON path ('-' = stdin)");
  sub->add_option("--link", cfg.link_id, "link_id to select (default: first)");
  sub->add_flag("--normalize-gains", cfg.normalize, "rescale gains so sum beta^2 = 1");
  sub->add_option("--synth-paths", cfg.synth_paths, "synthetic paths per link");
  sub->add_option("--synth-seed", cfg.synth_seed, "synthetic scenario seed");
  sub->add_option("--synth-decay", cfg.synth_decay, "synthetic gain decay");
  sub->add_option("--nt", cfg.nt, "Tx antenna count");
  sub->add_option("--nr", cfg.nr, "Rx antenna count");
  sub->add_option("--dt", cfg.dt, "Tx spacing (wavelengths)");
  sub->add_option("--dr", cfg.dr, "Rx spacing (wavelengths)");
  sub->add_option("--ns", cfg.ns, "applied multipath components N_s");
  sub->add_option("--nsa", cfg.nsa, "active eigen-subchannels N_s,a");
  sub->add_option("-L", cfg.L, "beam vector symbol count");
  sub->add_option("-M", cfg.M, "modulation order");
  sub->add_option("--family", cfg.family, "psk|qam|qamr (or a tag like psk16)");
  sub->add_option("--snr", cfg.snr, "SNR grid dB, start:step:stop");
  sub->add_option("--symbols", cfg.symbols, "symbols per SNR point");
  sub->add_option("--seed", cfg.seed, "simulation seed");
  sub->add_option("--baseline", cfg.baseline, "mca|ssm|gssm");
  sub->add_option("--out", cfg.out, "output path (default: stdout)");
  sub->add_flag("--json", cfg.as_json, "emit JSON instead of CSV");
  sub->add_option("--workers", cfg.workers, "Monte-Carlo worker threads");
  sub->add_option("--dump-effective", cfg.dump_effective, "write effective-channel JSON here");
  sub->add_option("--config", cfg.config_file, "JSON config file (flags take precedence)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multipath component aggregation for spatial scattering modulation"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto* opt = app.add_subcommand("optimize", "derive the aggregation matrix for one link");
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo bit error simulation");
  auto* abp = app.add_subcommand("abep", "union-bound ABEP curve");
  auto* eds = app.add_subcommand("ed-sweep", "minimum distance versus power ratio");
  auto* scs = app.add_subcommand("scenario-sweep", "per-link + aggregate ABEP over many links");
  auto* syn = app.add_subcommand("synth", "generate synthetic channel records");
  for (auto* sub : {opt, sim, abp, eds, scs, syn}) add_common(sub, cfg);
  eds->add_option("--iota-grid", cfg.iota_grid, "log grid lo:hi:npoints (default: auto)");
  scs->add_option("--links", cfg.synth_links, "synthetic ensemble size");
  scs->add_option("--per-link-out", cfg.per_link_out, "per-link CSV path");
  syn->add_option("--links", cfg.synth_links, "number of links to generate");
  syn->add_option("--paths", cfg.synth_paths, "paths per link");
  syn->add_option("--decay", cfg.synth_decay, "gain decay");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    if (!cfg.config_file.empty()) {
      std::ifstream in(cfg.config_file);
      if (!in) throw std::runtime_error("cannot open config file '" + cfg.config_file + "'");
      json j;
      in >> j;
      apply_json_config(j, *active, cfg);
    }
    if (active == opt) return cmd_optimize(cfg);
    if (active == sim) return cmd_simulate(cfg);
    if (active == abp) return cmd_abep(cfg);
    if (active == eds) return cmd_ed_sweep(cfg);
    if (active == scs) return cmd_scenario_sweep(cfg);
    if (active == syn) return cmd_synth(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
