#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polling/config.hpp"
#include "polling/csv.hpp"
#include "polling/errors.hpp"
#include "polling/fluid.hpp"
#include "polling/scenarios.hpp"
#include "polling/sim.hpp"
#include "polling/stability.hpp"

using namespace polling;

namespace {

int exit_code_for(Errc c) {
  switch (c) {
    case Errc::NonFiniteSample:
    case Errc::Internal:
      return 1;
    default:
      return 2;  // bad input of one kind or another
  }
}

std::array<int, 3> limits_of(const ModelParams& m) {
  return {m.queue[0].limit, m.queue[1].limit, m.queue[2].limit};
}

void print_warnings(const Config& cfg) {
  for (const auto& w : cfg.warnings)
    std::cerr << "note: " << w.where << ": " << w.what << "\n";
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path, std::ios::binary);  // binary: same bytes on every platform
  if (!file) throw Error(Errc::ParseError, path + ": cannot open for writing");
  return file;
}

// ---------------------------------------------------------------- stability

int do_stability_check(const std::string& config_path) {
  Config cfg = load_config(config_path);
  print_warnings(cfg);
  const DerivedQuantities d = derive_quantities(cfg.model);

  std::cout << "discipline: " << discipline_name(d.discipline) << "\n";
  std::cout << "arrival rates: " << fmt(d.arrival_rate[0]) << ", "
            << fmt(d.arrival_rate[1]) << ", " << fmt(d.arrival_rate[2]) << "\n";
  std::cout << "loads: " << fmt(d.load[0]) << ", " << fmt(d.load[1]) << ", "
            << fmt(d.load[2]) << "  (total " << fmt(d.total_load) << ")\n";
  std::cout << "mean walking time: standard cycle " << fmt(d.standard_walk_mean)
            << ", reduced cycle " << fmt(d.reduced_walk_mean) << "\n";

  const auto limits = limits_of(cfg.model);
  const StabilityVerdict v = d.discipline == Discipline::Limited
                                 ? check_limited(d, limits)
                                 : check_gated_exhaustive(d);

  std::cout << "conditions (each compares against 1):\n";
  for (const auto& row : v.conditions)
    std::cout << "  " << row.name << "  lhs=" << fmt(row.lhs) << "  "
              << (row.holds ? "holds" : "violated") << "\n";
  std::cout << "verdict: " << verdict_kind_name(v.kind);
  if (v.kind == VerdictKind::Unstable)
    std::cout << (v.transient ? " (transient)" : "");
  std::cout << "\n";
  const bool near_boundary =
      std::any_of(v.conditions.begin(), v.conditions.end(), [&](const ConditionRow& row) {
        return std::abs(row.lhs - row.threshold) <= row.threshold * v.boundary_band;
      });
  if (near_boundary)
    std::cout << "caution: at least one condition sits within " << fmt(v.boundary_band)
              << " of the boundary; the verdict is not meaningful at that resolution\n";

  if (v.kind == VerdictKind::Unstable && d.discipline == Discipline::Limited) {
    const auto g = divergence_rates(d, limits);
    std::cout << "growth-rate lower bounds (jobs per unit time):\n";
    for (int q : {1, 0, 2})
      if (g[q] > 0) std::cout << "  Q" << q + 1 << "' >= " << fmt(g[q]) << "\n";
  }
  return 0;
}

// ----------------------------------------------------------------- simulate

void estimate_csv_header(std::ostream& os) {
  os << "seed,p,u4,p_hw,u4_hw,f1,f2,f3,meanQ1,meanQ2,meanQ3,cycles,"
        "reduced_cycles,elapsed\n";
}

void estimate_csv_row(std::ostream& os, std::uint64_t seed, const Estimates& e) {
  os << fmt(static_cast<std::int64_t>(seed)) << ',' << fmt(e.p) << ',' << fmt(e.u4)
     << ',' << fmt(e.p_hw) << ',' << fmt(e.u4_hw);
  for (int k = 0; k < 3; ++k) os << ',' << fmt(e.empty_find_rate[k]);
  for (int k = 0; k < 3; ++k) os << ',' << fmt(e.mean_queue[k]);
  os << ',' << fmt(e.cycles) << ',' << fmt(e.reduced_cycles) << ',' << fmt(e.elapsed)
     << '\n';
}

void print_estimates(const Estimates& e, const ModelParams& m) {
  std::cout << "p   = " << fmt(e.p) << "   (95% halfwidth " << fmt(e.p_hw) << ")\n";
  std::cout << "u4  = " << fmt(e.u4) << "   (95% halfwidth " << fmt(e.u4_hw) << ")\n";
  std::cout << "empty-find rates: ";
  for (int k = 0; k < 3; ++k)
    std::cout << (k ? ", " : "") << "f" << k + 1 << "=" << fmt(e.empty_find_rate[k]);
  std::cout << "\nmean queue lengths: ";
  for (int k = 0; k < 3; ++k) {
    std::cout << (k ? ", " : "") << "Q" << k + 1 << "=";
    if (m.queue[k].saturated)
      std::cout << "saturated";
    else
      std::cout << fmt(e.mean_queue[k]);
  }
  std::cout << "\nreduced cycles " << fmt(e.reduced_cycles) << " of " << fmt(e.cycles)
            << ", elapsed model time " << fmt(e.elapsed) << "\n";
}

int do_simulate(const std::string& config_path, std::optional<std::int64_t> cycles,
                std::optional<std::int64_t> warmup, std::optional<std::uint64_t> seed,
                std::optional<int> replications, const std::string& out_path,
                const std::string& trace_path) {
  Config cfg = load_config(config_path);
  print_warnings(cfg);
  if (cycles) cfg.run.cycles = *cycles;
  if (warmup) cfg.run.warmup = *warmup;
  if (seed) cfg.run.seed = *seed;
  if (replications) cfg.run.replications = *replications;
  if (cfg.run.cycles < 1) throw Error(Errc::InvalidParams, "cycles must be >= 1");
  if (cfg.run.replications < 1)
    throw Error(Errc::InvalidParams, "replications must be >= 1");

  RunConfig rc;
  rc.cycles = cfg.run.cycles;
  rc.warmup = cfg.run.warmup;
  rc.seed = cfg.run.seed;

  std::ofstream out_file;
  std::ostream* out = out_path.empty() ? nullptr : &open_or_stdout(out_file, out_path);

  if (cfg.run.replications == 1) {
    std::ofstream trace_file;
    std::function<void(const TraceRow&)> sink;
    if (!trace_path.empty()) {
      trace_file.open(trace_path, std::ios::binary);
      if (!trace_file)
        throw Error(Errc::ParseError, trace_path + ": cannot open for writing");
      trace_file << "event_time,event_kind,station,Q1,Q2,Q3,cycle_index,cycle_type\n";
      sink = [&trace_file](const TraceRow& r) {
        trace_file << fmt(r.t) << ',' << event_kind_name(r.kind) << ',' << r.station
                   << ',' << r.q[0] << ',' << r.q[1] << ',' << r.q[2] << ','
                   << r.cycle << ',' << cycle_type_name(r.cycle_type) << '\n';
      };
    }
    const RunResult rr = run(cfg.model, rc, sink);
    print_estimates(rr.estimates, cfg.model);
    if (out) {
      estimate_csv_header(*out);
      estimate_csv_row(*out, rc.seed, rr.estimates);
    }
    return 0;
  }

  if (!trace_path.empty())
    throw Error(Errc::InvalidParams, "tracing works only with a single replication");
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < cfg.run.replications; ++i)
    seeds.push_back(cfg.run.seed + static_cast<std::uint64_t>(i));
  const PooledEstimates pe = run_replications(cfg.model, rc, seeds);
  for (const auto& r : pe.runs)
    std::cout << "seed " << r.seed << ": p=" << fmt(r.estimates.p)
              << " u4=" << fmt(r.estimates.u4) << "\n";
  std::cout << "pooled: p = " << fmt(pe.p_mean) << " (se " << fmt(pe.p_se) << "), u4 = "
            << fmt(pe.u4_mean) << " (se " << fmt(pe.u4_se) << ")\n";
  if (out) {
    estimate_csv_header(*out);
    for (const auto& r : pe.runs) estimate_csv_row(*out, r.seed, r.estimates);
  }
  return 0;
}

// -------------------------------------------------------------------- fluid

int do_fluid_integrate(const std::string& config_path, const std::vector<double>& q0v,
                       double t_end, const std::string& out_path) {
  Config cfg = load_config(config_path);
  print_warnings(cfg);
  const DerivedQuantities d = derive_quantities(cfg.model);
  std::array<double, 3> q0{};
  for (int k = 0; k < 3; ++k) {
    if (q0v[k] < 0) throw Error(Errc::InvalidParams, "initial levels must be >= 0");
    q0[k] = q0v[k];
  }

  const Trajectory tr = integrate(d, limits_of(cfg.model), q0, t_end);

  std::ofstream out_file;
  std::ostream& os = open_or_stdout(out_file, out_path);
  os << "t,Q1,Q2,Q3,region,tight\n";
  auto row = [&os](double t, const std::array<double, 3>& q, const std::string& region,
                   bool tight) {
    os << fmt(t) << ',' << fmt(q[0]) << ',' << fmt(q[1]) << ',' << fmt(q[2]) << ','
       << region << ',' << (tight ? 1 : 0) << '\n';
  };
  for (const auto& seg : tr.segments) row(seg.t0, seg.q0, seg.region, seg.tight);
  if (!tr.segments.empty()) {
    const auto& last = tr.segments.back();
    row(tr.t_stop, tr.q_stop, last.region, last.tight);
  }

  std::ostream& info = out_path.empty() ? std::cerr : std::cout;
  info << "stopped: " << stop_reason_name(tr.reason) << " at t=" << fmt(tr.t_stop)
       << ", levels (" << fmt(tr.q_stop[0]) << ", " << fmt(tr.q_stop[1]) << ", "
       << fmt(tr.q_stop[2]) << ")\n";
  if (tr.reason == StopReason::IntervalRegion)
    info << "the service rates in this region are only bounded, not pinned; "
            "levels beyond this point depend on whole distributions\n";
  return 0;
}

// -------------------------------------------------------------------- repro

struct ReproOutcome {
  int failures = 0;
  int comparisons = 0;
};

void repro_one(const Scenario& sc, std::optional<std::int64_t> cycles_override,
               ReproOutcome& outcome) {
  RunConfig rc;
  rc.cycles = cycles_override ? *cycles_override : sc.config.run.cycles;
  rc.warmup = sc.config.run.warmup;
  rc.seed = sc.config.run.seed;

  std::cout << sc.id << ": " << sc.summary << "\n";
  std::cout << "  cycles " << fmt(rc.cycles) << ", seed " << rc.seed << "\n";
  const RunResult rr = run(sc.config.model, rc);
  for (const auto& ref : sc.references) {
    const bool is_p = ref.quantity == "p";
    const double est = is_p ? rr.estimates.p : rr.estimates.u4;
    const double hw = is_p ? rr.estimates.p_hw : rr.estimates.u4_hw;
    const double err = std::fabs(est - ref.value);
    const bool pass = err <= ref.tolerance;
    outcome.comparisons += 1;
    if (!pass) outcome.failures += 1;
    std::cout << "  " << ref.quantity << ": estimate " << fmt(est) << " (halfwidth "
              << fmt(hw) << ") vs " << fmt(ref.value) << " +-" << fmt(ref.tolerance)
              << "  [" << ref.source << "]  " << (pass ? "PASS" : "FAIL") << "\n";
  }
}

int do_repro(const std::string& which, std::optional<std::int64_t> cycles_override) {
  ReproOutcome outcome;
  if (which == "table1") {
    for (const auto& row : table1_rows())
      repro_one(table1_scenario(row.a), cycles_override, outcome);
  } else {
    repro_one(scenario(which), cycles_override, outcome);
  }
  std::cout << (outcome.failures == 0 ? "all " : "") << outcome.comparisons
            << " comparisons done, " << outcome.failures << " failed\n";
  return outcome.failures == 0 ? 0 : 3;
}

// -------------------------------------------------------------------- sweep

int do_sweep(const std::string& config_path, const std::string& axis,
             const std::vector<double>& values, const std::string& out_path,
             const std::string& what, std::optional<std::int64_t> cycles_override) {
  std::ifstream in(config_path);
  if (!in) throw Error(Errc::ParseError, config_path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  const nlohmann::json base = parse_document(buf.str(), config_path);

  nlohmann::json::json_pointer ptr;
  try {
    ptr = nlohmann::json::json_pointer(axis);
  } catch (const nlohmann::json::parse_error&) {
    throw Error(Errc::BadAxis, "not a JSON pointer: \"" + axis +
                                   "\" (expected e.g. /queues/1/interarrival/shape)");
  }
  const nlohmann::json* target = nullptr;
  try {
    target = &base.at(ptr);
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::BadAxis, "axis " + axis + " does not resolve in " + config_path);
  }
  if (!target->is_number())
    throw Error(Errc::BadAxis, "axis " + axis + " is not a numeric field");
  const bool integral_axis = target->is_number_integer();

  std::ofstream out_file;
  std::ostream& os = open_or_stdout(out_file, out_path);

  if (what == "simulate")
    os << "value,p,u4,p_hw,u4_hw\n";
  else
    os << "value,verdict,transient,max_lhs,binding\n";

  for (double v : values) {
    nlohmann::json doc = base;
    if (integral_axis) {
      if (v != std::floor(v) || std::fabs(v) > 9e15)
        throw Error(Errc::BadAxis,
                    "axis " + axis + " holds an integer; got value " + fmt(v));
      doc[ptr] = static_cast<std::int64_t>(v);
    } else {
      doc[ptr] = v;
    }
    Config cfg = config_from_document(doc, config_path + " with " + axis + "=" + fmt(v));

    if (what == "simulate") {
      RunConfig rc;
      rc.cycles = cycles_override ? *cycles_override : cfg.run.cycles;
      rc.warmup = cfg.run.warmup;
      rc.seed = cfg.run.seed;  // same master seed for every row on purpose
      const RunResult rr = run(cfg.model, rc);
      os << fmt(v) << ',' << fmt(rr.estimates.p) << ',' << fmt(rr.estimates.u4) << ','
         << fmt(rr.estimates.p_hw) << ',' << fmt(rr.estimates.u4_hw) << '\n';
    } else {
      const DerivedQuantities d = derive_quantities(cfg.model);
      const StabilityVerdict verdict = d.discipline == Discipline::Limited
                                           ? check_limited(d, limits_of(cfg.model))
                                           : check_gated_exhaustive(d);
      double max_lhs = 0;
      std::string binding;
      for (const auto& row : verdict.conditions)
        if (row.lhs > max_lhs) {
          max_lhs = row.lhs;
          binding = row.name;
        }
      os << fmt(v) << ',' << verdict_kind_name(verdict.kind) << ','
         << (verdict.transient ? 1 : 0) << ',' << fmt(max_lhs) << ',' << binding
         << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-server cyclic polling toolkit: simulation, stability "
               "classification, fluid analysis"};
  app.require_subcommand(1);

  // stability check
  auto* stab = app.add_subcommand("stability", "stability classification");
  stab->require_subcommand(1);
  auto* stab_check = stab->add_subcommand("check", "classify the configured system");
  std::string stab_config;
  stab_check->add_option("--config", stab_config, "model config (JSON)")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "run the discrete-event simulator");
  std::string sim_config, sim_out, sim_trace;
  std::int64_t sim_cycles = -1, sim_warmup = -2;
  std::int64_t sim_seed = -1;
  int sim_reps = -1;
  sim->add_option("--config", sim_config, "model config (JSON)")->required();
  sim->add_option("--cycles", sim_cycles, "measured cycles (overrides config)");
  sim->add_option("--warmup", sim_warmup, "warmup cycles (overrides config)");
  sim->add_option("--seed", sim_seed, "master seed (overrides config)");
  sim->add_option("--replications", sim_reps, "independent replications (overrides config)");
  sim->add_option("--out", sim_out, "write estimates CSV here");
  sim->add_option("--trace", sim_trace, "write per-event trace CSV here");

  // fluid integrate
  auto* fluid = app.add_subcommand("fluid", "deterministic flow-level analysis");
  fluid->require_subcommand(1);
  auto* fint = fluid->add_subcommand("integrate", "piecewise-linear level trajectory");
  std::string fluid_config, fluid_out;
  std::vector<double> q0v;
  double t_end = 0;
  fint->add_option("--config", fluid_config, "model config (JSON)")->required();
  fint->add_option("--q0", q0v, "initial levels, three comma-separated numbers")
      ->required()
      ->delimiter(',')
      ->expected(3);
  fint->add_option("--t-end", t_end, "integrate up to this time")
      ->required()
      ->check(CLI::PositiveNumber);
  fint->add_option("--out", fluid_out, "write trajectory CSV here (default stdout)");

  // repro
  auto* repro = app.add_subcommand("repro", "re-measure published scenarios");
  std::string scenario_id;
  std::int64_t repro_cycles = -1;
  repro->add_option("scenario", scenario_id,
                    "example1..example5, table1, fig1_limit, or table1:a=<shape>")
      ->required();
  repro->add_option("--cycles", repro_cycles, "override the default cycle count");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "vary one numeric config field");
  std::string sweep_config, sweep_axis, sweep_out, sweep_what = "simulate";
  std::vector<double> sweep_values;
  std::int64_t sweep_cycles = -1;
  sweep->add_option("--config", sweep_config, "base config (JSON)")->required();
  sweep->add_option("--axis", sweep_axis, "JSON pointer to a numeric field")->required();
  sweep->add_option("--values", sweep_values, "comma-separated axis values")
      ->delimiter(',');
  sweep->add_option("--out", sweep_out, "write sweep CSV here (default stdout)");
  sweep->add_option("--what", sweep_what, "simulate or stability")
      ->check(CLI::IsMember({"simulate", "stability"}));
  sweep->add_option("--cycles", sweep_cycles, "override cycles for simulate rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(stab)) return do_stability_check(stab_config);
    if (app.got_subcommand(sim)) {
      return do_simulate(
          sim_config,
          sim_cycles >= 0 ? std::optional<std::int64_t>(sim_cycles) : std::nullopt,
          sim_warmup >= -1 ? std::optional<std::int64_t>(sim_warmup) : std::nullopt,
          sim_seed >= 0 ? std::optional<std::uint64_t>(static_cast<std::uint64_t>(sim_seed))
                        : std::nullopt,
          sim_reps >= 1 ? std::optional<int>(sim_reps) : std::nullopt, sim_out,
          sim_trace);
    }
    if (app.got_subcommand(fluid)) return do_fluid_integrate(fluid_config, q0v, t_end, fluid_out);
    if (app.got_subcommand(repro))
      return do_repro(scenario_id, repro_cycles >= 0
                                       ? std::optional<std::int64_t>(repro_cycles)
                                       : std::nullopt);
    if (app.got_subcommand(sweep))
      return do_sweep(sweep_config, sweep_axis, sweep_values, sweep_out, sweep_what,
                      sweep_cycles >= 0 ? std::optional<std::int64_t>(sweep_cycles)
                                        : std::nullopt);
  } catch (const Error& e) {
    std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
