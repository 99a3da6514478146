#pragma once

// Experiment drivers behind the command-line tool: convergence histories,
// stabilization-parameter sweeps, the lowest-order equivalence check and the
// inf-sup estimate across refinement levels.
//
// Every driver returns its rows plus a finished CSV string so tests can
// inspect numbers and byte output alike.  Errors are printed with four
// significant digits and orders with two decimals; slots that do not apply
// (first-row orders, higher-order sweep columns) carry "--".

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rshdg/analysis.hpp"
#include "rshdg/assemble.hpp"
#include "rshdg/condense.hpp"
#include "rshdg/cr_stokes.hpp"
#include "rshdg/exact.hpp"
#include "rshdg/mesh.hpp"

namespace rshdg {

struct RunConfig {
  std::string experiment;  // conv | tau-sweep | cr-equiv | infsup
  int k = 0;
  double tau = -1.0;  // <= 0 selects the default 10 (k+1)^2
  int levels = 4;
  int base_n = 4;
  bool base_n_set = false;  // the sweep mesh default differs from base_n
  int quad_boost = 4;
  std::string out;        // CSV destination; empty writes nothing
  std::string mesh_file;  // optional mesh override

  SpaceSpec space() const {
    return tau > 0.0 ? SpaceSpec(k, tau) : SpaceSpec::with_default_tau(k);
  }
};

namespace detail {

inline std::string fmt_err(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3E", v);
  return buf;
}

inline std::string fmt_order(double v) {
  if (!std::isfinite(v)) return "--";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string fmt_tau(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string fmt_h(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// Least-squares slope of log(y) against log(x) over the trailing window.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y,
                        std::size_t window) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_slope: need matched samples");
  const std::size_t first = x.size() > window ? x.size() - window : 0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (std::size_t i = first; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline Mesh level_mesh(const RunConfig& cfg, int level) {
  if (!cfg.mesh_file.empty()) {
    Mesh m = load_mesh(cfg.mesh_file);
    for (int i = 0; i < level; ++i) m = uniform_refine(m);
    return m;
  }
  return structured_unit_square(cfg.base_n << level);
}

struct SolveRecord {
  HdgSolution sol;
  double divergence_ratio;  // discrete divergence residual over ||f||
};

inline SolveRecord solve_manufactured(const Mesh& mesh, const SpaceSpec& spec,
                                      int quad_boost) {
  const ExactSolution exact = exact_trig();
  const GlobalSystem sys =
      assemble(mesh, spec, exact.body_force, exact.velocity, AssemblyOptions{quad_boost});
  SolveRecord rec{condense(sys).solve(), 0.0};
  rec.divergence_ratio = divergence_residual(rec.sol) / sys.f_l2;
  return rec;
}

}  // namespace detail

struct ConvResult {
  EocTable table;
  std::string csv;
  double max_divergence_ratio = 0.0;
};

inline ConvResult run_convergence(const RunConfig& cfg) {
  if (cfg.levels < 2) throw std::invalid_argument("run_convergence: need at least 2 levels");
  const ExactSolution exact = exact_trig();
  const SpaceSpec spec = cfg.space();

  ConvResult result;
  std::vector<ErrorReport> reports;
  for (int level = 0; level < cfg.levels; ++level) {
    const Mesh mesh = detail::level_mesh(cfg, level);
    const detail::SolveRecord rec = detail::solve_manufactured(mesh, spec, cfg.quad_boost);
    result.max_divergence_ratio = std::max(result.max_divergence_ratio, rec.divergence_ratio);
    reports.push_back(compute_errors(rec.sol, exact, cfg.quad_boost));
  }
  result.table = eoc(reports);

  std::string csv = "k,h,l2_u,order,h1_u,order,l2_p,order\n";
  for (int i = 0; i < cfg.levels; ++i) {
    const ErrorReport& r = result.table.rows[i];
    const bool first = i == 0;
    csv += std::to_string(cfg.k);
    csv += "," + detail::fmt_h(r.h);
    csv += "," + detail::fmt_err(r.l2_u);
    csv += "," + (first ? "--" : detail::fmt_order(result.table.order(ErrorColumn::l2_u, i)));
    csv += "," + detail::fmt_err(r.h1_u);
    csv += "," + (first ? "--" : detail::fmt_order(result.table.order(ErrorColumn::h1_u, i)));
    csv += "," + detail::fmt_err(r.l2_p);
    csv += "," + (first ? "--" : detail::fmt_order(result.table.order(ErrorColumn::l2_p, i)));
    csv += "\n";
  }
  result.csv = csv;
  detail::write_text(cfg.out, csv);
  if (!cfg.out.empty()) {
    detail::write_text(cfg.out + ".gp",
                       "set logscale xy\n"
                       "set datafile separator ','\n"
                       "set key left top\n"
                       "set xlabel 'h'\n"
                       "set ylabel 'error'\n"
                       "plot '" + cfg.out + "' using 2:3 with linespoints title 'L2(u)', \\\n"
                       "     '" + cfg.out + "' using 2:5 with linespoints title 'H1(u)', \\\n"
                       "     '" + cfg.out + "' using 2:7 with linespoints title 'L2(p)'\n");
  }
  return result;
}

struct TauSweepRow {
  double tau = 0.0;
  double jump = 0.0;
  double cr_h1 = std::numeric_limits<double>::quiet_NaN();  // lowest order only
  double cr_p = std::numeric_limits<double>::quiet_NaN();   // lowest order only
  double cauchy = 0.0;  // velocity seminorm distance to the double-tau solve
};

struct TauSweepResult {
  std::vector<TauSweepRow> rows;
  double jump_slope = 0.0;
  double cr_h1_slope = std::numeric_limits<double>::quiet_NaN();
  double cr_p_slope = std::numeric_limits<double>::quiet_NaN();
  double cauchy_slope = 0.0;
  std::string csv;
  double max_divergence_ratio = 0.0;
};

inline std::vector<double> default_tau_grid() { return {10.0, 20.0, 40.0, 80.0, 160.0, 320.0}; }

inline TauSweepResult run_tau_sweep(const RunConfig& cfg) {
  const Mesh mesh = !cfg.mesh_file.empty()
                        ? load_mesh(cfg.mesh_file)
                        : structured_unit_square(cfg.base_n_set ? cfg.base_n : 8);
  const ExactSolution exact = exact_trig();
  const std::vector<double> taus = default_tau_grid();

  TauSweepResult result;
  std::vector<HdgSolution> sols;
  for (double tau : taus) {
    const detail::SolveRecord rec =
        detail::solve_manufactured(mesh, SpaceSpec(cfg.k, tau), cfg.quad_boost);
    result.max_divergence_ratio = std::max(result.max_divergence_ratio, rec.divergence_ratio);
    sols.push_back(rec.sol);
  }
  const detail::SolveRecord doubled =
      detail::solve_manufactured(mesh, SpaceSpec(cfg.k, 2.0 * taus.back()), cfg.quad_boost);

  CrSolution cr;
  if (cfg.k == 0) cr = solve_cr(mesh, exact.body_force, &exact.velocity, cfg.quad_boost);

  for (std::size_t i = 0; i < taus.size(); ++i) {
    TauSweepRow row;
    row.tau = taus[i];
    row.jump = jump_value(sols[i]);
    if (cfg.k == 0) {
      row.cr_h1 = cr_h1_diff(cr, sols[i]);
      row.cr_p = cr_pressure_diff(cr, sols[i]);
    }
    const HdgSolution& next = i + 1 < sols.size() ? sols[i + 1] : doubled.sol;
    row.cauchy = h1_seminorm_diff(sols[i], next);
    result.rows.push_back(row);
  }

  const std::size_t window = 4;
  std::vector<double> jumps, h1s, ps, cauchys;
  for (const TauSweepRow& r : result.rows) {
    jumps.push_back(r.jump);
    h1s.push_back(r.cr_h1);
    ps.push_back(r.cr_p);
    cauchys.push_back(r.cauchy);
  }
  result.jump_slope = detail::fit_slope(taus, jumps, window);
  result.cauchy_slope = detail::fit_slope(taus, cauchys, window);
  if (cfg.k == 0) {
    result.cr_h1_slope = detail::fit_slope(taus, h1s, window);
    result.cr_p_slope = detail::fit_slope(taus, ps, window);
  }

  std::string csv = "tau,jump,diff_to_cr_h1,diff_to_cr_p,cauchy_diff\n";
  for (const TauSweepRow& r : result.rows) {
    csv += detail::fmt_tau(r.tau);
    csv += "," + detail::fmt_err(r.jump);
    csv += "," + (cfg.k == 0 ? detail::fmt_err(r.cr_h1) : std::string("--"));
    csv += "," + (cfg.k == 0 ? detail::fmt_err(r.cr_p) : std::string("--"));
    csv += "," + detail::fmt_err(r.cauchy);
    csv += "\n";
  }
  csv += "slope";
  csv += "," + detail::fmt_order(result.jump_slope);
  csv += "," + (cfg.k == 0 ? detail::fmt_order(result.cr_h1_slope) : std::string("--"));
  csv += "," + (cfg.k == 0 ? detail::fmt_order(result.cr_p_slope) : std::string("--"));
  csv += "," + detail::fmt_order(result.cauchy_slope);
  csv += "\n";
  result.csv = csv;
  detail::write_text(cfg.out, csv);
  if (!cfg.out.empty()) {
    detail::write_text(cfg.out + ".gp",
                       "set logscale xy\n"
                       "set datafile separator ','\n"
                       "set key right top\n"
                       "set xlabel 'tau'\n"
                       "set ylabel 'seminorm'\n"
                       "plot '" + cfg.out + "' using 1:2 with linespoints title 'jump', \\\n"
                       "     '" + cfg.out + "' using 1:5 with linespoints title 'cauchy'\n");
  }
  return result;
}

struct CrEquivRow {
  std::string mesh_label;
  double tau = 0.0;
  double midpoint_disc = 0.0;
  double pressure_disc = 0.0;
};

struct CrEquivResult {
  std::vector<CrEquivRow> rows;
  double max_midpoint = 0.0;
  double max_pressure = 0.0;
  std::string csv;
  double max_divergence_ratio = 0.0;
};

inline CrEquivResult run_cr_equiv(const RunConfig& cfg) {
  const ExactSolution exact = exact_trig();
  const std::vector<double> taus = {10.0, 100.0, 1000.0};

  std::vector<std::pair<std::string, Mesh>> meshes;
  if (!cfg.mesh_file.empty()) {
    meshes.emplace_back(cfg.mesh_file, load_mesh(cfg.mesh_file));
  } else {
    for (int n : {2, 4, 8})
      meshes.emplace_back("structured(" + std::to_string(n) + ")", structured_unit_square(n));
  }

  CrEquivResult result;
  std::string csv = "mesh,tau,midpoint_disc,pressure_disc\n";
  for (const auto& [label, mesh] : meshes) {
    const CrSolution cr = solve_cr(mesh, exact.body_force, &exact.velocity, cfg.quad_boost);
    for (double tau : taus) {
      const detail::SolveRecord rec =
          detail::solve_manufactured(mesh, SpaceSpec(0, tau), cfg.quad_boost);
      result.max_divergence_ratio = std::max(result.max_divergence_ratio, rec.divergence_ratio);
      const CrDiscrepancy d = compare_with_cr(rec.sol, cr);
      result.rows.push_back({label, tau, d.velocity, d.pressure});
      result.max_midpoint = std::max(result.max_midpoint, d.velocity);
      result.max_pressure = std::max(result.max_pressure, d.pressure);
      csv += label + "," + detail::fmt_tau(tau) + "," + detail::fmt_err(d.velocity) + "," +
             detail::fmt_err(d.pressure) + "\n";
    }
  }
  result.csv = csv;
  detail::write_text(cfg.out, csv);
  return result;
}

struct InfsupRow {
  double h = 0.0;
  double beta = 0.0;
};

struct InfsupResult {
  std::vector<InfsupRow> rows;
  double ratio = 0.0;  // min beta over max beta
  bool flagged = false;
  bool truncated = false;  // dimension guard stopped the level loop
  std::string csv;
};

inline InfsupResult run_infsup(const RunConfig& cfg) {
  const SpaceSpec spec = cfg.space();
  InfsupResult result;
  std::string csv = "h,beta_h\n";

  if (!cfg.mesh_file.empty()) {
    const Mesh mesh = load_mesh(cfg.mesh_file);
    result.rows.push_back({mesh.h, infsup_estimate(mesh, spec)});
    csv += detail::fmt_h(mesh.h) + "," + detail::fmt_err(result.rows.back().beta) + "\n";
  } else {
    const int start = cfg.base_n_set ? cfg.base_n : 2;
    for (int level = 0; level < cfg.levels; ++level) {
      const Mesh mesh = structured_unit_square(start << level);
      try {
        const double beta = infsup_estimate(mesh, spec);
        result.rows.push_back({mesh.h, beta});
        csv += detail::fmt_h(mesh.h) + "," + detail::fmt_err(beta) + "\n";
      } catch (const DimensionGuardError&) {
        result.truncated = true;
        break;
      }
    }
  }
  if (result.rows.empty())
    throw std::runtime_error("run_infsup: no level fits under the dimension guard");

  if (result.rows.size() >= 2) {
    double lo = result.rows[0].beta, hi = result.rows[0].beta;
    for (const InfsupRow& r : result.rows) {
      lo = std::min(lo, r.beta);
      hi = std::max(hi, r.beta);
    }
    result.ratio = lo / hi;
    result.flagged = result.ratio < 0.8;
    csv += "ratio," + detail::fmt_order(result.ratio) + "\n";
    if (result.flagged) csv += "flag,ratio_below_0.8\n";
  }
  result.csv = csv;
  detail::write_text(cfg.out, csv);
  return result;
}

}  // namespace rshdg
