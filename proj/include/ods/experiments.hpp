#pragma once

// Experiment drivers behind the `ods` command line: simulate, plan, fig2, fig3.
// Each writes CSV (17 significant digits, '\n' line endings) and, for the
// figure commands, a gnuplot script next to it.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "ods/adiabaticity.hpp"
#include "ods/config.hpp"
#include "ods/lindblad.hpp"
#include "ods/planner.hpp"

namespace ods {

inline constexpr const char* kTrajectoryHeader =
    "t,rho11,rho22,rho33,re_rho21,im_rho21,abs_rho21_sq,dark_overlap";
inline constexpr const char* kScanHeader = "n,t,F,F2";

namespace detail {

inline void append_number(std::string& out, double v) {
  char buf[40];
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os = open_output(path);
  os << content;
  os.flush();
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace detail

inline std::string trajectory_csv(const std::vector<Observables>& rows) {
  std::string out = kTrajectoryHeader;
  out += '\n';
  for (const Observables& o : rows) {
    for (double v : {o.t, o.rho11, o.rho22, o.rho33, o.re_rho21, o.im_rho21, o.abs_rho21_sq}) {
      detail::append_number(out, v);
      out += ',';
    }
    detail::append_number(out, o.dark_overlap);
    out += '\n';
  }
  return out;
}

inline std::string scan_csv(const std::vector<ScanPoint>& rows) {
  std::string out = kScanHeader;
  out += '\n';
  for (const ScanPoint& p : rows) {
    detail::append_number(out, p.n);
    out += ',';
    detail::append_number(out, p.t);
    out += ',';
    detail::append_number(out, p.fidelity);
    out += ',';
    detail::append_number(out, p.overlap);
    out += '\n';
  }
  return out;
}

inline std::string trajectory_plot_script(const std::string& csv_name, const std::string& title,
                                          double period) {
  std::string s;
  s += "# gnuplot script: populations and ground coherence vs time\n";
  s += "set datafile separator ','\n";
  s += "set terminal pngcairo size 900,600\n";
  s += "set output '" + csv_name.substr(0, csv_name.rfind('.')) + ".png'\n";
  s += "set title '" + title + "'\n";
  s += "set xlabel 't (1/gamma31)'\n";
  s += "set ylabel 'population'\n";
  s += "set yrange [-0.05:1.05]\n";
  std::string tp;
  detail::append_number(tp, period);
  s += "T = " + tp + "\n";
  s += "set arrow from 4*T, graph 0 to 4*T, graph 1 nohead dashtype 2\n";
  s += "plot '" + csv_name + "' using 1:2 with lines title 'rho11', \\\n";
  s += "     '' using 1:3 with lines title 'rho22', \\\n";
  s += "     '' using 1:4 with lines title 'rho33', \\\n";
  s += "     '' using 1:7 with lines title '|rho21|^2'\n";
  return s;
}

inline std::string scan_plot_script(const std::string& csv_name, const std::string& inset_name) {
  std::string s;
  s += "# gnuplot script: fidelity to |1> at integer periods, first period inset\n";
  s += "set datafile separator ','\n";
  s += "set terminal pngcairo size 900,600\n";
  s += "set output 'fig3.png'\n";
  s += "set multiplot\n";
  s += "set xlabel 't / T'\n";
  s += "set ylabel 'F'\n";
  s += "set yrange [0.9:1.005]\n";
  s += "plot '" + csv_name + "' using 1:3 with points pt 7 ps 0.4 title 'F(nT)'\n";
  s += "set origin 0.45,0.15\n";
  s += "set size 0.45,0.4\n";
  s += "unset xlabel\n";
  s += "unset ylabel\n";
  s += "set autoscale y\n";
  s += "plot '" + inset_name + "' using 1:3 with lines title 'first period'\n";
  s += "unset multiplot\n";
  return s;
}

struct SimulationSummary {
  double max_rho33 = 0.0;          // plateau samples only
  double max_abs_rho21_sq = 0.0;   // all samples
  double min_rho11 = 1.0;
  double max_rho11 = 0.0;
  double max_coherence_product_gap = 0.0;  // max | |rho21|^2 - rho11 rho22 | over the plateau
  double population_period = std::nan("");  // period of rho11 - rho22
  double drive_period = 0.0;                // T = 2 pi / |delta|
  int zero_crossings = 0;
  std::optional<AdiabaticityReport> adiabaticity;
};

/// Mean spacing of the sign changes of rho11 - rho22 (linearly interpolated);
/// the population period is twice that spacing. NaN with fewer than 3 crossings.
inline double population_period(const std::vector<Observables>& rows, int* crossings = nullptr) {
  std::vector<double> zc;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double a = rows[k - 1].rho11 - rows[k - 1].rho22;
    const double b = rows[k].rho11 - rows[k].rho22;
    if ((a < 0.0) != (b < 0.0) && a != b) {
      zc.push_back(rows[k - 1].t + (rows[k].t - rows[k - 1].t) * a / (a - b));
    }
  }
  if (crossings) *crossings = static_cast<int>(zc.size());
  if (zc.size() < 3) return std::nan("");
  return 2.0 * (zc.back() - zc.front()) / static_cast<double>(zc.size() - 1);
}

inline SimulationSummary summarize(const std::vector<Observables>& rows, const DriveParams& params,
                                   const RampSchedule& schedule) {
  SimulationSummary s;
  s.drive_period = params.small_delta() != 0.0 ? params.period() : std::nan("");
  std::vector<Observables> plateau;
  for (const Observables& o : rows) {
    s.max_abs_rho21_sq = std::max(s.max_abs_rho21_sq, o.abs_rho21_sq);
    s.min_rho11 = std::min(s.min_rho11, o.rho11);
    s.max_rho11 = std::max(s.max_rho11, o.rho11);
    if (envelope(schedule, o.t) == 1.0) {
      plateau.push_back(o);
      s.max_rho33 = std::max(s.max_rho33, o.rho33);
      s.max_coherence_product_gap =
          std::max(s.max_coherence_product_gap, std::abs(o.abs_rho21_sq - o.rho11 * o.rho22));
    }
  }
  s.population_period = population_period(plateau, &s.zero_crossings);
  if (params.is_ods_valid()) {
    s.adiabaticity = evolving_margin(params, RampSchedule::always_on(), 0.0);
  }
  return s;
}

inline void print_summary(std::ostream& os, const SimulationSummary& s) {
  os << "max_rho33(plateau)=" << s.max_rho33 << " max_abs_rho21_sq=" << s.max_abs_rho21_sq
     << " rho11_range=[" << s.min_rho11 << "," << s.max_rho11 << "]\n";
  os << "population_period=" << s.population_period << " (zero crossings " << s.zero_crossings
     << ") drive_period_T=" << s.drive_period << " T/2=" << 0.5 * s.drive_period << '\n';
  if (s.adiabaticity) {
    os << "adiabaticity regime=" << to_string(s.adiabaticity->regime)
       << " ratio=" << s.adiabaticity->ratio << '\n';
  } else {
    os << "adiabaticity regime=n/a (drive is not ODS-valid)\n";
  }
}

struct SimulationResult {
  std::vector<Observables> rows;
  SimulationSummary summary;
  std::filesystem::path csv_path;
};

/// Evolves the configured initial state over [0, t_end_periods T].
inline SimulationResult run_simulation(const ExperimentConfig& cfg) {
  cfg.validate();
  const RampSchedule schedule = cfg.schedule();
  const double t_end = cfg.run.t_end_periods * cfg.period();
  const std::vector<double> times = sample_grid(0.0, t_end, cfg.sample_interval());
  const Trajectory traj = evolve(initial_density(cfg.run.initial_state), cfg.drive, schedule, cfg.rates,
                                 cfg.run.frame, times, cfg.integrator);
  SimulationResult r;
  r.rows = observables(traj, cfg.drive, schedule);
  r.summary = summarize(r.rows, cfg.drive, schedule);
  return r;
}

inline SimulationResult cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                     std::ostream& log) {
  SimulationResult r = run_simulation(cfg);
  r.csv_path = out_dir / "trajectory.csv";
  detail::write_file(r.csv_path, trajectory_csv(r.rows));
  log << "wrote " << r.csv_path.string() << " (" << r.rows.size() << " rows)\n";
  print_summary(log, r.summary);
  return r;
}

struct PlanOutcome {
  ProtocolPlan plan;
  std::optional<ProtocolResult> verification;
};

inline PlanOutcome cmd_plan(const ExperimentConfig& cfg, bool verify, std::ostream& log) {
  if (!cfg.run.target) {
    throw UsageError("plan: no target given (set target_alpha and optionally target_beta)");
  }
  cfg.validate();
  PlanOutcome out{plan_superposition(*cfg.run.target, cfg.drive), std::nullopt};
  const ProtocolPlan& p = out.plan;
  char buf[160];
  std::snprintf(buf, sizeof buf, "target: alpha=%.17g beta=%.17g\n", cfg.run.target->alpha,
                cfg.run.target->beta);
  log << buf;
  std::snprintf(buf, sizeof buf, "period T=%.17g\ndelta_phi=%.17g\nt0=%.17g (%.6g T)\n", p.period,
                p.delta_phi, p.t0, p.t0 / p.period);
  log << buf;
  log << "retrieval_times:";
  for (double t : p.retrieval_times) {
    std::snprintf(buf, sizeof buf, " %.17g", t);
    log << buf;
  }
  log << "\ntransfer_times:";
  for (double t : p.transfer_times) {
    std::snprintf(buf, sizeof buf, " %.17g", t);
    log << buf;
  }
  log << '\n';
  if (verify) {
    out.verification = run_protocol(p, initial_density(cfg.run.initial_state), cfg.drive, cfg.rates,
                                    cfg.integrator, static_cast<std::size_t>(cfg.run.retrieval_index),
                                    cfg.run.frame);
    std::snprintf(buf, sizeof buf, "verify: retrieval_time=%.17g F=%.17g F2=%.17g\n",
                  out.verification->retrieval_time, out.verification->score.fidelity,
                  out.verification->score.overlap);
    log << buf;
  }
  return out;
}

/// Rabi frequency of a fig2 panel: a -> 2, b -> 0.2, c -> 0.08.
inline double fig2_omega(char variant) {
  switch (variant) {
    case 'a': return 2.0;
    case 'b': return 0.2;
    case 'c': return 0.08;
    default: throw UsageError(std::string("fig2: variant must be a, b or c, got '") + variant + "'");
  }
}

inline SimulationResult cmd_fig2(char variant, ExperimentConfig cfg, const std::filesystem::path& out_dir,
                                 std::ostream& log) {
  cfg.drive.omega12 = cfg.drive.omega34 = fig2_omega(variant);
  cfg.run.t_end_periods = 4.0;
  SimulationResult r = run_simulation(cfg);
  const std::string stem = std::string("fig2_") + variant;
  r.csv_path = out_dir / (stem + ".csv");
  detail::write_file(r.csv_path, trajectory_csv(r.rows));
  char title[96];
  std::snprintf(title, sizeof title, "Omega = %g", cfg.drive.omega12);
  detail::write_file(out_dir / (stem + ".gp"), trajectory_plot_script(stem + ".csv", title, cfg.period()));
  log << "wrote " << r.csv_path.string() << " and " << (out_dir / (stem + ".gp")).string() << '\n';
  print_summary(log, r.summary);
  return r;
}

inline FidelityScan cmd_fig3(const ExperimentConfig& cfg, int n_max, const std::filesystem::path& out_dir,
                             std::ostream& log) {
  cfg.validate();
  if (n_max < 1) throw UsageError("fig3: n-max must be >= 1");
  const RampSchedule schedule = cfg.schedule();
  FidelityScan scan = fidelity_scan(cfg.drive, cfg.rates, cfg.integrator, n_max, &schedule, 100,
                                    cfg.run.frame);
  detail::write_file(out_dir / "fig3.csv", scan_csv(scan.periods));
  detail::write_file(out_dir / "fig3_inset.csv", scan_csv(scan.inset));
  detail::write_file(out_dir / "fig3.gp", scan_plot_script("fig3.csv", "fig3_inset.csv"));
  log << "wrote " << (out_dir / "fig3.csv").string() << ", fig3_inset.csv, fig3.gp\n";
  double min_after_first = 1.0;
  for (std::size_t n = 1; n < scan.periods.size(); ++n) {
    min_after_first = std::min(min_after_first, scan.periods[n].fidelity);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "F(T)=%.6f F(%dT)=%.6f min F(nT>=T)=%.6f gamma21=%.6g\n",
                scan.periods[1].fidelity, n_max, scan.periods.back().fidelity, min_after_first,
                cfg.rates.gamma21());
  log << buf;
  return scan;
}

}  // namespace ods
