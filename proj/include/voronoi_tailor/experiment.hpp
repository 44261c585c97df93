#pragma once

// Experiment driver: random starts, optimization runs, SVG and CSV output,
// finite-difference gradient checks and the reference table sweeps.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "diagram.hpp"
#include "merit.hpp"
#include "region.hpp"
#include "spg.hpp"

namespace vtailor {

/// κ points drawn uniformly in the region by rejection from its bounding box.
inline std::vector<Point> random_sites(const Region &region, std::size_t kappa, std::uint64_t seed) {
  Rng rng(seed);
  const BoundingBox b = region.bounds();
  std::vector<Point> out;
  out.reserve(kappa);
  while (out.size() < kappa) {
    const Point p{rng.uniform(b.lo.x, b.hi.x), rng.uniform(b.lo.y, b.hi.y)};
    if (region.contains(p)) out.push_back(p);
  }
  return out;
}

/// Adapts an objective for the minimizer; geometric failures become NaN so
/// the line search backs off.
inline ValueAndGradient as_value_and_gradient(const Objective &obj) {
  return [&obj](std::span<const double> x, std::span<double> g) {
    try {
      Evaluation ev = obj.evaluate(x);
      std::copy(ev.gradient.begin(), ev.gradient.end(), g.begin());
      return ev.value;
    } catch (const GeometryError &) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
}

// ---------------------------------------------------------------------------
// Configuration

enum class Coloring { none, j2_balance, j3_balance, j4_segments };

inline Coloring parse_coloring(std::string_view s) {
  if (s == "none") return Coloring::none;
  if (s == "j2_balance") return Coloring::j2_balance;
  if (s == "j3_balance") return Coloring::j3_balance;
  if (s == "j4_segments") return Coloring::j4_segments;
  throw Error("unknown coloring '" + std::string(s) + "' (none, j2_balance, j3_balance, j4_segments)");
}

struct RunConfig {
  std::string region = "regular_polygon";
  int kappa = 100;
  /// A positive number, "auto" or "table1".
  std::string scale = "table1";
  std::string objective = default_objective;
  std::uint64_t seed = 1;
  int trials = 10;
  SpgOptions spg;
  std::string svg, csv, dump;
  Coloring color = Coloring::none;
  /// Label for the CSV Problem column; defaults to the region name.
  std::string label;
};

struct ScaledRegion {
  Region region;
  double factor = 1.0;
  std::string note;
};

/// Region of the config scaled per its scale setting. "table1" falls back to
/// "auto" when no reference factor exists for κ.
inline ScaledRegion scaled_region(const RunConfig &cfg) {
  if (cfg.kappa < 1) throw Error("kappa must be at least 1");
  std::optional<RegionPreset> pre;
  for (const auto &n : preset_names())
    if (n == cfg.region) pre = preset(n);
  const Region base = pre ? pre->region : load_region(cfg.region);
  ScaledRegion out;
  if (cfg.scale == "table1") {
    if (pre && pre->table_scale.count(cfg.kappa)) {
      out.factor = pre->table_scale.at(cfg.kappa);
    } else {
      out.factor = suggest_scale(base, cfg.kappa);
      out.note = "no reference factor for this region and kappa; using auto";
    }
  } else if (cfg.scale == "auto") {
    out.factor = suggest_scale(base, cfg.kappa);
  } else {
    double v = 0.0;
    const auto res = std::from_chars(cfg.scale.data(), cfg.scale.data() + cfg.scale.size(), v);
    if (res.ec != std::errc() || res.ptr != cfg.scale.data() + cfg.scale.size() || !(v > 0.0))
      throw Error("scale must be a positive number, auto or table1 (got '" + cfg.scale + "')");
    out.factor = v;
  }
  out.region = base.scaled(out.factor);
  return out;
}

// ---------------------------------------------------------------------------
// Formatting

namespace detail {

inline std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

} // namespace detail

inline const char *csv_header = "Problem,scaling factor,|A|,p,kappa,ntrials,f(a*),||grad f(a*)||_inf,it,fcnt,Time,stop";

struct CsvRow {
  std::string problem;
  double factor = 1.0, area = 0.0;
  std::size_t parts = 1;
  int kappa = 0, ntrials = 0;
  double f = 0.0, gnorm = 0.0;
  int it = 0, fcnt = 0;
  double seconds = 0.0;
  std::string stop;

  std::string str() const {
    using detail::fmt;
    std::ostringstream o;
    o << problem << ',' << fmt("%.5E", factor) << ',' << fmt("%.5E", area) << ',' << parts << ',' << kappa << ','
      << ntrials << ',' << fmt("%.5E", f) << ',' << fmt("%.1E", gnorm) << ',' << it << ',' << fcnt << ','
      << fmt("%.2f", seconds) << ',' << stop;
    return o.str();
  }
};

/// Tone index 0..5 per cell: how many thresholds c in `sweep` the cell's
/// smallest ratio falls below (0 = balanced for every c).
inline std::vector<int> balance_tones(const Diagram &dg, Coloring mode) {
  static constexpr double edge_sweep[] = {0.1, 0.2, 0.3, 0.4, 0.5};
  static constexpr double angle_sweep[] = {0.5, 0.6, 0.7, 0.8, 0.9};
  detail::require_convex(dg, "balance coloring");
  std::vector<int> tones(dg.cells.size(), 0);
  for (std::size_t i = 0; i < dg.cells.size(); ++i) {
    const auto *edges = detail::single_piece_edges(dg.cells[i]);
    if (!edges || edges->empty()) continue;
    double ratio = std::numeric_limits<double>::infinity();
    if (mode == Coloring::j2_balance) {
      const double ebar = dg.cells[i].perimeter / static_cast<double>(edges->size());
      for (const auto &e : *edges) ratio = std::min(ratio, e.length() / ebar);
    } else {
      std::vector<double> th;
      const std::size_t ne = edges->size();
      for (std::size_t t = 0; t < ne; ++t)
        if (!std::holds_alternative<CornerVertex>((*edges)[t].v_class))
          th.push_back(interior_angle((*edges)[(t + ne - 1) % ne], (*edges)[t]));
      if (th.empty()) continue;
      double mean = 0.0;
      for (double t : th) mean += t;
      mean /= static_cast<double>(th.size());
      for (double t : th) ratio = std::min(ratio, t / mean);
    }
    const double *sweep = mode == Coloring::j2_balance ? edge_sweep : angle_sweep;
    for (int k = 0; k < 5; ++k) tones[i] += ratio < sweep[k];
  }
  return tones;
}

/// SVG of the diagram: one polygon per cell piece, a dot per site, optional
/// balance shading or [p_E, q_E] segments.
inline void write_svg(std::ostream &out, const Diagram &dg, const BoundingBox &extent, Coloring mode = Coloring::none) {
  static const char *palette[] = {"#ffffff", "#dbe9f6", "#9ecae1", "#4292c6", "#2171b5", "#08306b"};
  using detail::fmt;
  const double w = extent.width(), h = extent.height();
  const double size = std::max({w, h, 1e-12});
  const double stroke = size / 800.0;
  const double pad = size * 0.02;
  std::vector<int> tones;
  if (mode == Coloring::j2_balance || mode == Coloring::j3_balance) tones = balance_tones(dg, mode);
  auto X = [&](double x) { return fmt("%.6f", x - extent.lo.x + pad); };
  auto Y = [&](double y) { return fmt("%.6f", extent.hi.y - y + pad); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"" << fmt("%.0f", 800.0 * (h + 2 * pad) / (w + 2 * pad))
      << "\" viewBox=\"0 0 " << fmt("%.6f", w + 2 * pad) << ' ' << fmt("%.6f", h + 2 * pad) << "\">\n";
  out << "<g id=\"cells\" stroke=\"#000000\" stroke-width=\"" << fmt("%.6f", stroke) << "\" stroke-linejoin=\"round\">\n";
  for (std::size_t i = 0; i < dg.cells.size(); ++i)
    for (const auto &pc : dg.cells[i].pieces) {
      out << "<polygon data-cell=\"" << i << "\" fill=\"" << palette[tones.empty() ? 0 : tones[i]] << "\" points=\"";
      for (std::size_t t = 0; t < pc.vertices.size(); ++t)
        out << (t ? " " : "") << X(pc.vertices[t].x) << ',' << Y(pc.vertices[t].y);
      out << "\"/>\n";
    }
  out << "</g>\n";
  if (mode == Coloring::j4_segments) {
    out << "<g id=\"segments\" stroke=\"#1f4fff\" stroke-width=\"" << fmt("%.6f", 2 * stroke) << "\">\n";
    for (std::size_t i = 0; i < dg.cells.size(); ++i) {
      for (const auto &pc : dg.cells[i].pieces)
        for (const auto &e : pc.edges) {
          if (e.kind != EdgeKind::interior || static_cast<std::size_t>(e.neighbor) < i) continue;
          const Point p = e.midpoint();
          const Point q = (dg.sites[i] + dg.sites[static_cast<std::size_t>(e.neighbor)]) * 0.5;
          out << "<line x1=\"" << X(p.x) << "\" y1=\"" << Y(p.y) << "\" x2=\"" << X(q.x) << "\" y2=\"" << Y(q.y)
              << "\"/>\n";
        }
    }
    out << "</g>\n";
  }
  out << "<g id=\"sites\" fill=\"#d62728\">\n";
  for (Point s : dg.sites)
    out << "<circle cx=\"" << X(s.x) << "\" cy=\"" << Y(s.y) << "\" r=\"" << fmt("%.6f", 2.5 * stroke) << "\"/>\n";
  out << "</g>\n</svg>\n";
}

// ---------------------------------------------------------------------------
// Runs

struct RunResult {
  ScaledRegion region;
  MultiTrialReport report;
  Evaluation final;
  CsvRow row;
  int exit_code = 1;
};

inline std::string problem_label(const std::string &region) {
  if (region == "convex_hexagon") return "Convex polygon";
  if (region == "regular_polygon") return "Regular polygon";
  if (region == "letter_a") return "Letter A";
  if (region == "key") return "Key";
  return region;
}

/// Optimization run without side effects on the file system.
inline RunResult optimize(const RunConfig &cfg) {
  RunResult res;
  res.region = scaled_region(cfg);
  const Objective obj(parse_objective(cfg.objective), res.region.region);
  const Region &region = obj.region();
  const auto kappa = static_cast<std::size_t>(cfg.kappa);
  auto start = [&](std::uint64_t s) {
    const auto pts = random_sites(region, kappa, s);
    return flatten(pts);
  };
  res.report = multi_trial(as_value_and_gradient(obj), start, cfg.trials, cfg.seed, cfg.spg);
  res.final = obj.evaluate(std::span<const double>(res.report.best.x));
  const SpgReport &b = res.report.best;
  double seconds = 0.0;
  for (const auto &t : res.report.trials) seconds += t.seconds;
  res.row = {cfg.label.empty() ? problem_label(cfg.region) : cfg.label,
             res.region.factor,
             region.area(),
             region.part_count(),
             cfg.kappa,
             res.report.ntrials,
             b.f,
             b.gnorm,
             b.it,
             b.fcnt,
             seconds,
             to_string(b.reason)};
  res.exit_code = converged(b.reason) ? 0 : 1;
  return res;
}

/// Optimizes and writes the requested artifacts; returns the process exit code.
inline int run(const RunConfig &cfg, std::ostream &log = std::clog) {
  RunResult res = optimize(cfg);
  if (!res.region.note.empty()) log << "note: " << res.region.note << "\n";
  if (!cfg.csv.empty()) {
    std::ofstream f(cfg.csv);
    if (!f) throw Error("cannot write " + cfg.csv);
    f << csv_header << "\n" << res.row.str() << "\n";
  }
  if (!cfg.svg.empty()) {
    std::ofstream f(cfg.svg);
    if (!f) throw Error("cannot write " + cfg.svg);
    write_svg(f, res.final.diagram, res.region.region.bounds(), cfg.color);
  }
  if (!cfg.dump.empty()) {
    std::ofstream f(cfg.dump);
    if (!f) throw Error("cannot write " + cfg.dump);
    write_dump(f, res.final.diagram);
  }
  log << csv_header << "\n" << res.row.str() << "\n";
  for (const auto &t : res.final.terms) {
    log << "  J" << t.kind << " = " << detail::fmt("%.6E", t.value);
    if (t.kind == 4 && !t.per_cell.empty())
      log << " (per-cell mean " << detail::fmt("%.6E", t.value / static_cast<double>(t.per_cell.size())) << ")";
    log << "\n";
  }
  return res.exit_code;
}

// ---------------------------------------------------------------------------
// Finite-difference gradient checks

/// Central-difference gradient of `f` at x with step h * max(1, |x_k|).
inline std::vector<double> central_differences(const std::function<double(std::span<const double>)> &f,
                                               std::span<const double> x, double h = 1e-6) {
  std::vector<double> xt(x.begin(), x.end()), g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double step = h * std::max(1.0, std::abs(x[k]));
    xt[k] = x[k] + step;
    const double fp = f(xt);
    xt[k] = x[k] - step;
    const double fm = f(xt);
    xt[k] = x[k];
    g[k] = (fp - fm) / (2 * step);
  }
  return g;
}

/// |analytic - fd|_inf / max(|fd|_inf, 1e-8).
inline double relative_sup_error(std::span<const double> analytic, std::span<const double> fd) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < fd.size(); ++k) {
    diff = std::max(diff, std::abs(analytic[k] - fd[k]));
    scale = std::max(scale, std::abs(fd[k]));
  }
  return diff / std::max(scale, 1e-8);
}

struct GradCheckRow {
  int point = 0;
  std::string term;
  double value = 0.0;
  double error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckRow> rows;
  int resamples = 0;
  double tolerance = 1e-5;
  bool ok() const {
    return !rows.empty() && std::all_of(rows.begin(), rows.end(), [&](const GradCheckRow &r) { return r.error <= tolerance; });
  }
};

/// Regular enough for finite differences: no degeneracy within `margin` and
/// every min/max clause at least 10 h away from switching.
inline bool fd_ready(const Evaluation &ev, double h, double margin = 1e3 * eps_reg) {
  return verify_regularity(ev.diagram, margin).ok() && ev.kink_margin >= 10 * h;
}

/// Compares each term's analytic gradient with central differences at
/// n_points random configurations, resampling irregular ones up to 10 times each.
inline GradCheckReport check_grad(const RunConfig &cfg, int n_points, double h = 1e-6) {
  const ScaledRegion sr = scaled_region(cfg);
  const ObjectiveSpec spec = parse_objective(cfg.objective);
  const Objective full(spec, sr.region);
  GradCheckReport rep;
  std::uint64_t stream = cfg.seed;
  for (int p = 0; p < n_points; ++p) {
    std::vector<double> x;
    bool found = false;
    for (int attempt = 0; attempt <= 10 && !found; ++attempt) {
      x = flatten(random_sites(sr.region, static_cast<std::size_t>(cfg.kappa), splitmix64(stream)));
      try {
        found = fd_ready(full.evaluate(std::span<const double>(x)), h);
      } catch (const GeometryError &) {
        found = false;
      }
      if (!found) ++rep.resamples;
    }
    if (!found) continue;
    for (const auto &t : spec.terms) {
      const Objective single(ObjectiveSpec{{ObjectiveTerm{t.kind, 1.0, t.delta, t.mode, t.c, t.psi}}}, sr.region);
      const Evaluation ev = single.evaluate(std::span<const double>(x));
      const auto fd = central_differences([&](std::span<const double> y) { return single.evaluate(y).value; }, x, h);
      rep.rows.push_back({p, "j" + std::to_string(t.kind), ev.value, relative_sup_error(ev.gradient, fd)});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Reference tables

struct TableOptions {
  std::uint64_t seed = 1;
  int trials = 10;
  /// Largest κ run for table1b.
  int max_kappa = 10000;
  /// κ for the table2/table3 sweeps.
  int sweep_kappa = 100;
  SpgOptions spg;
};

inline std::vector<RunConfig> table_configs(std::string_view which, const TableOptions &opt) {
  std::vector<RunConfig> rows;
  auto base = [&](std::string region, int kappa, std::string objective) {
    RunConfig c;
    c.region = std::move(region);
    c.kappa = kappa;
    c.objective = std::move(objective);
    c.seed = opt.seed;
    c.trials = opt.trials;
    c.spg = opt.spg;
    return c;
  };
  if (which == "table1") {
    for (const char *r : {"convex_hexagon", "regular_polygon", "letter_a", "key"})
      for (int k : {100, 1000}) rows.push_back(base(r, k, default_objective));
  } else if (which == "table1b") {
    for (const auto &[k, f] : preset("regular_polygon").table_scale)
      if (k <= opt.max_kappa) rows.push_back(base("regular_polygon", k, default_objective));
  } else if (which == "table2") {
    for (const char *c : {"0.1", "0.2", "0.3", "0.4", "0.5"}) {
      auto cfg = base("regular_polygon", opt.sweep_kappa, std::string("j0:10@delta=0.1,j1:1,j2:1@c2=") + c);
      cfg.label = std::string("c2=") + c;
      cfg.trials = 1;
      rows.push_back(cfg);
    }
  } else if (which == "table3") {
    for (const char *c : {"0.5", "0.6", "0.7"}) {
      auto cfg = base("regular_polygon", opt.sweep_kappa,
                      std::string("j0:10@delta=0.1,j1:1,j2:1@c2=0.4,j3:1@c3=") + c);
      cfg.label = std::string("c3=") + c;
      cfg.trials = 1;
      rows.push_back(cfg);
    }
  } else {
    throw Error("unknown table '" + std::string(which) + "' (table1, table1b, table2, table3)");
  }
  return rows;
}

/// Runs every row of a reference table, writing CSV lines as they finish.
/// Failing rows are recorded and the sweep continues. Returns rows that converged.
inline int reproduce_table(std::string_view which, const TableOptions &opt, std::ostream &out) {
  int ok = 0;
  out << csv_header << "\n";
  for (const auto &cfg : table_configs(which, opt)) {
    try {
      RunResult r = optimize(cfg);
      ok += r.exit_code == 0;
      out << r.row.str() << "\n";
    } catch (const std::exception &e) {
      CsvRow row;
      row.problem = cfg.label.empty() ? problem_label(cfg.region) : cfg.label;
      row.kappa = cfg.kappa;
      row.stop = std::string("error: ") + e.what();
      std::replace(row.stop.begin(), row.stop.end(), ',', ';');
      out << row.str() << "\n";
    }
    out.flush();
  }
  return ok;
}

} // namespace vtailor
