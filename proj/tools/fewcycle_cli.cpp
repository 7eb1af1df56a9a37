// Command-line front end: drives the integrator, the closed forms, and the
// sweep campaigns, and serializes results with provenance manifests.
#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fewcycle/analytic.hpp"
#include "fewcycle/engine.hpp"
#include "fewcycle/experiments.hpp"
#include "fewcycle/io.hpp"
#include "fewcycle/manifest.hpp"
#include "fewcycle/pulse.hpp"
#include "fewcycle/validate.hpp"

namespace {

using namespace fewcycle;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct CommonOpts {
  std::string shape = "square";
  double detuning = 0.0;
  double field = 0.0;
  std::string cep = "0";
  double cycles = 2.0;
  int steps_per_cycle = 2000;
  std::string mode = "fixed";
  std::string out;
  std::string format = "csv";
  int parallel = 0;
  std::string config; // consumed by the pre-parse injection pass
};

IntegratorConfig integrator_from(const CommonOpts& o) {
  IntegratorConfig cfg;
  cfg.steps_per_cycle = o.steps_per_cycle;
  cfg.mode = step_mode_from_name(o.mode);
  return cfg;
}

std::string pick_out(const CommonOpts& o, const char* base) {
  if (!o.out.empty()) return o.out;
  return std::string(base) + (o.format == "json" ? ".json" : ".csv");
}

// map.csv -> map_guideline.csv (suffix before the extension).
std::string sibling(const std::string& path, const std::string& suffix) {
  const std::size_t slash = path.find_last_of('/');
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

void write_table(const std::string& path, const std::string& format,
                 const Table& t, const RunManifest& m) {
  if (format == "json")
    write_table_json(path, t, m);
  else
    write_table_csv(path, t);
  write_manifest_sidecar(path, m);
}

bool analytic_column_applies(Shape shape, double cycles) {
  if (shape != Shape::Square) return false;
  const double n = std::round(cycles);
  return n >= 1.0 && std::abs(cycles - n) <= 1e-9;
}

// Reads the flat JSON config named by --config (if any) and appends
// "--key value" for every key not already given on the command line.
void inject_config(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;
  const nlohmann::json j = nlohmann::json::parse(read_file(path));
  if (!j.is_object())
    throw std::invalid_argument("config must be a flat JSON object of flag values");
  for (const auto& [key, value] : j.items()) {
    if (key == "config") continue;
    const std::string flag = "--" + key;
    bool present = false;
    for (const std::string& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) { present = true; break; }
    if (present) continue;
    args.push_back(flag);
    args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
}

int run_simulate(const CommonOpts& o) {
  const PulseSpec pulse =
      make_pulse(shape_from_name(o.shape), o.field, parse_angle(o.cep), o.cycles);
  const TlsParams tls = tls_from_detuning_ratio(o.detuning);
  const IntegratorConfig cfg = integrator_from(o);
  const Trajectory traj = integrate_tls(pulse, tls, cfg);
  RunManifest m = make_manifest("simulate", pulse, o.detuning, cfg);
  m.notes["max_norm_deviation"] = format_g17(traj.max_norm_deviation);
  const std::string out = pick_out(o, "trajectory");
  write_table(out, o.format, trajectory_table(traj), m);
  std::cout << "wrote " << out << " (" << traj.size()
            << " rows); final w = " << format_g17(traj.w.back()) << "\n";
  return 0;
}

int run_analytic(const CommonOpts& o, const std::string& observable, int samples) {
  if (shape_from_name(o.shape) != Shape::Square)
    throw std::invalid_argument("closed form derived for square pulse only");
  const double phi = parse_angle(o.cep);
  const PulseSpec pulse = make_pulse(Shape::Square, o.field, phi, o.cycles);
  const TlsParams tls = tls_from_detuning_ratio(o.detuning);
  const DerivedParams d = derive_params(pulse, tls);
  RunManifest m = make_manifest("analytic", pulse, o.detuning, IntegratorConfig{});
  m.notes["observable"] = observable;
  m.notes["validity_metric"] = format_g17(d.validity_metric);
  if (d.validity_metric >= kValidityGuideline) m.notes["regime_warning"] = "true";

  Table t;
  if (observable == "wf") {
    const long n = require_integer_cycles(pulse);
    const FinalInversionResult r = final_inversion_analytic(phi, n, pulse, tls);
    t.columns = {"cep",        "w_f",        "w_f_linear",       "delta_w",
                 "q",          "theta_f_sq", "theta_f_sq_exact", "w_f_exact_theta"};
    t.rows = {{phi, r.w_f, r.w_f_linear, r.delta_w, r.q, r.theta_f_sq,
               r.theta_f_sq_exact, r.w_f_exact_theta}};
  } else if (observable == "q") {
    const long n = require_integer_cycles(pulse);
    t.columns = {"detuning", "cycles", "q"};
    t.rows = {{o.detuning, static_cast<double>(n), q_factor(n, pulse, tls)}};
  } else if (observable == "f_trace") {
    t.columns = {"t", "re_f", "im_f", "abs_f", "c_prob", "w"};
    for (double time : linspace(0.0, pulse.t_end, static_cast<std::size_t>(samples))) {
      const GuardedComplex g = f_analytic(time, pulse, tls);
      t.rows.push_back({time, g.value.real(), g.value.imag(), std::abs(g.value),
                        upper_prob_from_f(g.value), inversion_from_f(g.value)});
    }
  } else { // theta
    t.columns = {"t", "re_theta", "im_theta", "abs_theta"};
    for (double time : linspace(0.0, pulse.t_end, static_cast<std::size_t>(samples))) {
      const std::complex<double> th = theta_closed(time, pulse, tls);
      t.rows.push_back({time, th.real(), th.imag(), std::abs(th)});
    }
  }
  const std::string out = pick_out(o, "analytic");
  write_table(out, o.format, t, m);
  std::cout << "wrote " << out << " (" << t.rows.size() << " rows)\n";
  return 0;
}

int run_scan(const CommonOpts& o, const std::string& x_range,
             const std::string& y_range, long n_cycles) {
  const double phi = parse_angle(o.cep);
  const IntegratorConfig cfg = integrator_from(o);
  const std::vector<double> xs = parse_range(x_range);

  if (!y_range.empty()) {
    // 2D: x = field ratio, y = detuning ratio; emits matrix + guideline.
    const std::vector<double> ys = parse_range(y_range);
    const AgreementMap am = agreement_map(xs, ys, phi, n_cycles, cfg, o.parallel);
    const std::string out = pick_out(o, "map");
    const std::string gout = sibling(out, "_guideline");
    if (o.format == "json") {
      write_table_json(out, gridmap_long_table(am.map), am.map.meta);
    } else {
      write_gridmap_csv(out, am.map);
    }
    write_manifest_sidecar(out, am.map.meta);
    write_table(gout, o.format, guideline_table(am), am.map.meta);
    std::cout << "wrote " << out << " (" << am.map.ny() << "x" << am.map.nx()
              << " cells) and " << gout << "\n";
    if (am.failed_cells > 0) {
      std::cerr << am.failed_cells << " of " << am.map.values.size()
                << " cells failed (NaN sentinels written)\n";
      return 4;
    }
    return 0;
  }

  // 1D: x = detuning ratio at fixed --field.
  const std::vector<SweepRecord> recs =
      detuning_scan(o.field, xs, phi, n_cycles, cfg, o.parallel);
  RunManifest m = make_manifest(
      "scan", make_pulse(Shape::Square, o.field, phi, static_cast<double>(n_cycles)),
      kNaN, cfg);
  m.notes["x_axis"] = "detuning " + x_range;
  const std::string out = pick_out(o, "scan");
  write_table(out, o.format,
              sweep_table(recs, "detuning", "c_prob_analytic", "c_prob_numeric",
                          {{"field_ratio", o.field},
                           {"cep", phi},
                           {"cycles", static_cast<double>(n_cycles)}}),
              m);
  std::size_t bad = 0;
  for (const SweepRecord& r : recs)
    if (!std::isfinite(r.analytic) || !std::isfinite(r.numeric)) ++bad;
  std::cout << "wrote " << out << " (" << recs.size() << " rows)\n";
  if (bad > 0) {
    std::cerr << bad << " of " << recs.size()
              << " points failed (NaN sentinels written)\n";
    return 4;
  }
  return 0;
}

int run_cep_sweep(const CommonOpts& o, const std::string& phi_range) {
  const Shape shape = shape_from_name(o.shape);
  const IntegratorConfig cfg = integrator_from(o);
  const std::vector<double> phis = parse_range(phi_range, /*include_end=*/false);
  const std::vector<SweepRecord> recs = cep_sweep(
      shape, o.detuning, o.field, o.cycles, phis, cfg, o.parallel, SweepEngines::Both);
  RunManifest m = make_manifest(
      "cep-sweep", make_pulse(shape, o.field, 0.0, o.cycles), o.detuning, cfg);
  m.cep = kNaN;
  m.notes["phi_axis"] = phi_range + " (endpoint excluded)";
  const std::string out = pick_out(o, "cep_sweep");
  write_table(out, o.format,
              sweep_table(recs, "cep", "delta_w_analytic", "delta_w_numeric",
                          {{"detuning", o.detuning},
                           {"field_ratio", o.field},
                           {"cycles", o.cycles}}),
              m);
  const bool want_analytic = analytic_column_applies(shape, o.cycles);
  std::size_t bad = 0;
  for (const SweepRecord& r : recs)
    if (!std::isfinite(r.numeric) || (want_analytic && !std::isfinite(r.analytic)))
      ++bad;
  std::cout << "wrote " << out << " (" << recs.size() << " rows)\n";
  if (bad > 0) {
    std::cerr << bad << " of " << recs.size()
              << " points failed (NaN sentinels written)\n";
    return 4;
  }
  return 0;
}

int run_field_sweep(const CommonOpts& o, const std::vector<std::string>& phi_args,
                    const std::string& x_range) {
  const Shape shape = shape_from_name(o.shape);
  const IntegratorConfig cfg = integrator_from(o);
  std::vector<double> ceps;
  for (const std::string& s : phi_args) ceps.push_back(parse_angle(s));
  if (ceps.empty()) ceps.push_back(0.0);
  const std::vector<double> grid = parse_range(x_range);
  const std::vector<FieldSweepCurve> curves = field_sweep(
      shape, ceps, grid, o.detuning, o.cycles, cfg, o.parallel, SweepEngines::Both);
  RunManifest m = make_manifest(
      "field-sweep", make_pulse(shape, grid.front(), ceps.front(), o.cycles),
      o.detuning, cfg);
  m.field_ratio = kNaN;
  m.cep = ceps.size() > 1 ? kNaN : ceps.front();
  m.notes["field_axis"] = x_range;
  const std::string out = pick_out(o, "field_sweep");
  write_table(out, o.format,
              field_sweep_table(curves, {{"detuning", o.detuning},
                                         {"cycles", o.cycles}}),
              m);
  const bool want_analytic = analytic_column_applies(shape, o.cycles);
  std::size_t bad = 0, total = 0;
  for (const FieldSweepCurve& c : curves)
    for (const SweepRecord& r : c.records) {
      ++total;
      if (!std::isfinite(r.numeric) || (want_analytic && !std::isfinite(r.analytic)))
        ++bad;
    }
  std::cout << "wrote " << out << " (" << total << " rows, " << curves.size()
            << " curves)\n";
  if (bad > 0) {
    std::cerr << bad << " of " << total << " points failed (NaN sentinels written)\n";
    return 4;
  }
  return 0;
}

int run_validate(const std::string& out_dir, const std::vector<int>& criteria,
                 int steps_per_cycle, int parallel) {
  ValidateOptions vo;
  vo.out_dir = out_dir.empty() ? "validate_out" : out_dir;
  vo.workers = parallel;
  vo.integrator.steps_per_cycle = steps_per_cycle;
  vo.only = criteria;
  const std::vector<CriterionResult> results = run_acceptance(vo);
  print_results(std::cout, results);
  return all_passed(results) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw(argv + 1, argv + argc);
  try {
    inject_config(raw);
  } catch (const std::exception& e) {
    std::cerr << error_json("usage", e.what()) << "\n";
    return 2;
  }

  CLI::App app{"few-cycle drive of a two-level atom: numeric integrator, "
               "closed-form observables, and sweep campaigns"};
  app.require_subcommand(1);

  CommonOpts sim_o, ana_o, scan_o, cep_o, fld_o;
  std::string observable = "wf";
  int samples = 512;
  std::string scan_x, scan_y, phi_range = "0:2pi:64", fld_x;
  long scan_cycles = 2;
  std::vector<std::string> fld_phis;
  std::string val_out = "validate_out";
  std::vector<int> val_criteria;
  int val_spc = 2000, val_parallel = 0;

  const auto add_common = [](CLI::App* cmd, CommonOpts& o, bool with_field,
                             bool with_detuning, bool with_cycles) {
    cmd->add_option("--shape", o.shape, "pulse shape: square | tophat | gaussian");
    if (with_detuning)
      cmd->add_option("--detuning", o.detuning,
                      "carrier/transition frequency ratio, in (0,1)")
          ->required();
    if (with_field)
      cmd->add_option("--field", o.field, "peak coupling / carrier frequency")
          ->required();
    cmd->add_option("--cep", o.cep, "carrier-envelope phase (radians or \"0.5pi\")");
    if (with_cycles) cmd->add_option("--cycles", o.cycles, "pulse length in cycles");
    cmd->add_option("--steps-per-cycle", o.steps_per_cycle, "fixed-step resolution")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--mode", o.mode, "integrator mode")
        ->check(CLI::IsMember({"fixed", "adaptive"}));
    cmd->add_option("--out", o.out, "output path");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--parallel", o.parallel, "worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--config", o.config,
                    "flat JSON config mirroring these flags; explicit flags win");
  };

  CLI::App* sim = app.add_subcommand("simulate", "integrate one pulse and dump the trajectory");
  add_common(sim, sim_o, true, true, true);

  CLI::App* ana = app.add_subcommand("analytic", "evaluate closed-form observables (square pulse)");
  add_common(ana, ana_o, true, true, true);
  ana->add_option("--observable", observable, "f_trace | wf | q | theta")
      ->check(CLI::IsMember({"f_trace", "wf", "q", "theta"}));
  ana->add_option("--samples", samples, "trace sample count")->check(CLI::PositiveNumber);

  CLI::App* scan = app.add_subcommand(
      "scan", "final-state agreement: 1D over detuning (--x-range + --field), or "
              "2D field x detuning map (--x-range + --y-range)");
  add_common(scan, scan_o, true, false, false);
  scan->get_option("--field")->required(false);
  scan->add_option("--x-range", scan_x, "lo:hi:n (detuning for 1D, field for 2D)")
      ->required();
  scan->add_option("--y-range", scan_y, "lo:hi:n detuning axis (enables 2D map)");
  scan->add_option("--cycles", scan_cycles, "whole carrier cycles")
      ->check(CLI::PositiveNumber);

  CLI::App* cep = app.add_subcommand("cep-sweep", "final inversion shift vs carrier-envelope phase");
  add_common(cep, cep_o, true, true, true);
  cep->add_option("--phi-range", phi_range, "lo:hi:n, endpoint excluded");

  CLI::App* fld = app.add_subcommand("field-sweep", "final inversion vs peak field, one curve per --phi");
  add_common(fld, fld_o, false, true, true);
  fld->add_option("--x-range", fld_x, "lo:hi:n field-ratio axis")->required();
  fld->add_option("--phi", fld_phis, "CEP value, repeatable (radians or \"0.5pi\")");

  CLI::App* val = app.add_subcommand("validate", "run the analytic-vs-numeric acceptance battery");
  val->add_option("--out", val_out, "campaign output directory");
  val->add_option("--criterion", val_criteria, "run only these criteria (1-10), repeatable")
      ->check(CLI::Range(1, 10));
  val->add_option("--steps-per-cycle", val_spc, "fixed-step resolution")
      ->check(CLI::PositiveNumber);
  val->add_option("--parallel", val_parallel, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  std::string val_config;
  val->add_option("--config", val_config,
                  "flat JSON config mirroring these flags; explicit flags win");

  std::vector<std::string> argvec;
  argvec.reserve(raw.size() + 1);
  argvec.emplace_back(argv[0]);
  argvec.insert(argvec.end(), raw.begin(), raw.end());
  std::vector<char*> cargv;
  cargv.reserve(argvec.size());
  for (std::string& s : argvec) cargv.push_back(s.data());

  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << error_json("usage", e.what()) << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(sim)) return run_simulate(sim_o);
    if (app.got_subcommand(ana)) return run_analytic(ana_o, observable, samples);
    if (app.got_subcommand(scan)) {
      if (scan_y.empty() && !scan->count("--field"))
        throw std::invalid_argument("1D scan needs --field (or add --y-range for a 2D map)");
      return run_scan(scan_o, scan_x, scan_y, scan_cycles);
    }
    if (app.got_subcommand(cep)) return run_cep_sweep(cep_o, phi_range);
    if (app.got_subcommand(fld)) return run_field_sweep(fld_o, fld_phis, fld_x);
    if (app.got_subcommand(val))
      return run_validate(val_out, val_criteria, val_spc, val_parallel);
  } catch (const std::invalid_argument& e) {
    std::cerr << error_json("usage", e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_json("numerical", e.what()) << "\n";
    return 3;
  }
  return 0;
}
