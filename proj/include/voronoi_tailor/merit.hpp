#pragma once

// Merit functions J0..J5 of a clipped Voronoi diagram, their exact gradients,
// and weighted combinations of them.

#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diagram.hpp"
#include "region.hpp"
#include "sensitivity.hpp"

namespace vtailor {

struct MeritResult {
  double value = 0.0;
  std::vector<double> gradient;
  /// Per-cell term (J^l_i); empty for J0.
  std::vector<double> per_cell;
  /// Smallest distance, in coordinate units, from an active-set switch of a
  /// min/max clause. Infinite for smooth merits.
  double kink_margin = std::numeric_limits<double>::infinity();
};

enum class NeighborMode { automatic, delaunay_neighbors, all_pairs };

/// Up to this many sites, automatic J0 mode compares all pairs.
inline constexpr std::size_t j0_all_pairs_below = 64;

/// sum over pairs of max{0, delta^2 - |a_i - a_j|^2}^2.
inline MeritResult eval_J0(std::span<const Point> sites, const std::vector<std::vector<int>> &neighbors,
                           double delta, NeighborMode mode = NeighborMode::automatic,
                           std::span<const std::pair<int, int>> extra_pairs = {}) {
  if (!(delta > 0.0)) throw Error("J0 requires delta > 0");
  const std::size_t n = sites.size();
  if (mode == NeighborMode::automatic)
    mode = n <= j0_all_pairs_below ? NeighborMode::all_pairs : NeighborMode::delaunay_neighbors;
  MeritResult r;
  r.gradient.assign(2 * n, 0.0);
  const double d2 = delta * delta;
  auto pair = [&](std::size_t i, std::size_t j) {
    const Point diff = sites[i] - sites[j];
    const double dist2 = norm2(diff);
    r.kink_margin = std::min(r.kink_margin, std::abs(std::sqrt(dist2) - delta));
    const double t = d2 - dist2;
    if (t <= 0.0) return;
    r.value += t * t;
    add_slot(r.gradient, static_cast<int>(i), diff * (-4.0 * t));
    add_slot(r.gradient, static_cast<int>(j), diff * (4.0 * t));
  };
  if (mode == NeighborMode::all_pairs) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pair(i, j);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (int j : neighbors[i])
        if (static_cast<std::size_t>(j) > i) pair(i, static_cast<std::size_t>(j));
    for (auto [i, j] : extra_pairs) pair(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return r;
}

inline MeritResult eval_J0(const Diagram &dg, double delta, NeighborMode mode = NeighborMode::automatic) {
  return eval_J0(dg.sites, dg.delaunay.neighbors, delta, mode, dg.duplicate_sites);
}

/// Desired-area field psi with its gradient.
struct FieldFunction {
  std::string name = "one";
  std::function<double(Point)> value = [](Point) { return 1.0; };
  std::function<Point(Point)> gradient = [](Point) { return Point{}; };
};

namespace detail {

inline void check_diagram(const Diagram &dg) {
  if (!dg.duplicate_sites.empty())
    throw SingularityError("coincident sites " + std::to_string(dg.duplicate_sites.front().first) + " and " +
                               std::to_string(dg.duplicate_sites.front().second),
                           dg.sites[static_cast<std::size_t>(dg.duplicate_sites.front().first)]);
  if (dg.sites.empty()) throw Error("diagram has no sites");
}

inline void require_convex(const Diagram &dg, const char *what) {
  if (dg.part_count != 1)
    throw Error(std::string(what) + " needs a convex region (one part); this region has " +
                std::to_string(dg.part_count) + " parts");
}

// Shared by J1 and J5: (1/κ) sum (|V_i| / (|A|/κ) - psi_i)^2.
inline MeritResult area_merit(const Diagram &dg, const std::function<double(std::size_t)> &target,
                              const std::function<Point(std::size_t)> &target_grad) {
  check_diagram(dg);
  const std::size_t n = dg.sites.size();
  const double kappa = static_cast<double>(n);
  const double ideal = dg.region_area / kappa;
  MeritResult r;
  r.gradient.assign(2 * n, 0.0);
  r.per_cell.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ji = dg.cells[i].area / ideal - target(i);
    r.per_cell[i] = ji;
    r.value += ji * ji;
  }
  r.value /= kappa;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 2.0 / kappa * r.per_cell[i];
    cell_area_gradient(r.gradient, dg, i, w / ideal);
    const Point g = target_grad(i);
    if (g.x != 0.0 || g.y != 0.0) add_slot(r.gradient, static_cast<int>(i), g * -w);
  }
  return r;
}

// Ordered genuine edges of a one-piece cell.
inline const std::vector<CellEdge> *single_piece_edges(const Cell &c) {
  if (c.pieces.size() != 1) return nullptr;
  return &c.pieces.front().edges;
}

} // namespace detail

/// Equal areas: (1/κ) sum (|V_i| / (|A|/κ) - 1)^2.
inline MeritResult eval_J1(const Diagram &dg) {
  return detail::area_merit(dg, [](std::size_t) { return 1.0; }, [](std::size_t) { return Point{}; });
}

/// Areas graded by psi(a_i): (1/κ) sum (|V_i| / (|A|/κ) - psi(a_i))^2.
inline MeritResult eval_J5(const Diagram &dg, const FieldFunction &psi) {
  return detail::area_merit(
      dg, [&](std::size_t i) { return psi.value(dg.sites[i]); }, [&](std::size_t i) { return psi.gradient(dg.sites[i]); });
}

/// Edge balance: sum_i (1/n_i) sum_E min{0, |E|/Ebar_i - c2}^2.
inline MeritResult eval_J2(const Diagram &dg, double c2) {
  detail::check_diagram(dg);
  detail::require_convex(dg, "J2");
  if (!(c2 > 0.0 && c2 < 1.0)) throw Error("J2 requires c2 in (0, 1)");
  const std::size_t n = dg.sites.size();
  MeritResult r;
  r.gradient.assign(2 * n, 0.0);
  r.per_cell.assign(n, 0.0);
  std::vector<double> viol;
  for (std::size_t i = 0; i < n; ++i) {
    const auto *edges = detail::single_piece_edges(dg.cells[i]);
    if (!edges || edges->empty()) continue;
    const double ni = static_cast<double>(edges->size());
    const double P = dg.cells[i].perimeter;
    const double ebar = P / ni;
    viol.assign(edges->size(), 0.0);
    double ji = 0.0, weighted = 0.0;
    for (std::size_t t = 0; t < edges->size(); ++t) {
      const double len = (*edges)[t].length();
      const double slack = len / ebar - c2;
      r.kink_margin = std::min(r.kink_margin, std::abs(slack) * ebar);
      viol[t] = std::min(0.0, slack);
      ji += viol[t] * viol[t];
      weighted += len / P * viol[t];
    }
    ji /= ni;
    r.per_cell[i] = ji;
    r.value += ji;
    for (std::size_t t = 0; t < edges->size(); ++t) {
      const double mu = 2.0 / P * (viol[t] - weighted);
      if (mu != 0.0) edge_length_gradient(r.gradient, dg.sites, (*edges)[t], mu);
    }
  }
  return r;
}

/// Interior angle at v_E between the previous edge and E, in (0, pi) for convex cells.
inline double interior_angle(const CellEdge &prev, const CellEdge &e) {
  const Point a = prev.tangent(), b = e.tangent();
  return std::numbers::pi - std::atan2(cross(a, b), dot(a, b));
}

/// Angle balance: sum_i (1/|E~_i|) sum_E min{0, theta_E/thetabar_i - c3}^2 over
/// edges whose start vertex is not a corner of the region.
inline MeritResult eval_J3(const Diagram &dg, double c3) {
  detail::check_diagram(dg);
  detail::require_convex(dg, "J3");
  if (!(c3 > 0.0 && c3 < 1.0)) throw Error("J3 requires c3 in (0, 1)");
  const std::size_t n = dg.sites.size();
  MeritResult r;
  r.gradient.assign(2 * n, 0.0);
  r.per_cell.assign(n, 0.0);
  std::vector<std::size_t> used;
  std::vector<double> theta, viol;
  for (std::size_t i = 0; i < n; ++i) {
    const auto *edges = detail::single_piece_edges(dg.cells[i]);
    if (!edges || edges->empty()) continue;
    const std::size_t ne = edges->size();
    used.clear();
    theta.clear();
    for (std::size_t t = 0; t < ne; ++t) {
      const CellEdge &e = (*edges)[t];
      if (std::holds_alternative<CornerVertex>(e.v_class)) continue;
      const double th = interior_angle((*edges)[(t + ne - 1) % ne], e);
      if (!(std::sin(th) > eps_reg)) throw SingularityError("degenerate cell angle", e.v);
      used.push_back(t);
      theta.push_back(th);
    }
    if (used.empty()) continue;
    const double m = static_cast<double>(used.size());
    double mean = 0.0;
    for (double th : theta) mean += th;
    mean /= m;
    viol.assign(used.size(), 0.0);
    double ji = 0.0, weighted = 0.0;
    for (std::size_t u = 0; u < used.size(); ++u) {
      const double slack = theta[u] / mean - c3;
      const std::size_t t = used[u];
      const double reach = std::min((*edges)[t].length(), (*edges)[(t + ne - 1) % ne].length());
      r.kink_margin = std::min(r.kink_margin, std::abs(slack) * mean * reach);
      viol[u] = std::min(0.0, slack);
      ji += viol[u] * viol[u];
      weighted += theta[u] / (mean * m) * viol[u];
    }
    ji /= m;
    r.per_cell[i] = ji;
    r.value += ji;
    for (std::size_t u = 0; u < used.size(); ++u) {
      const double eta = 2.0 / (mean * m) * (viol[u] - weighted);
      if (eta == 0.0) continue;
      const std::size_t t = used[u];
      const CellEdge &e = (*edges)[t];
      const CellEdge &prev = (*edges)[(t + ne - 1) % ne];
      const double we = eta / e.length(), wp = -eta / prev.length();
      const Point ne_ = e.normal(), np_ = prev.normal();
      accumulate_F(r.gradient, dg.sites, e.w, e.w_class, ne_, we);
      accumulate_F(r.gradient, dg.sites, e.v, e.v_class, ne_, -we);
      accumulate_F(r.gradient, dg.sites, prev.w, prev.w_class, np_, wp);
      accumulate_F(r.gradient, dg.sites, prev.v, prev.v_class, np_, -wp);
    }
  }
  return r;
}

/// Midpoint match: sum_i (1/|E_i^int|) sum_E |p_E - q_E|^2 / |E|^2.
/// Cells without interior edges contribute nothing.
inline MeritResult eval_J4(const Diagram &dg) {
  detail::check_diagram(dg);
  detail::require_convex(dg, "J4");
  const std::size_t n = dg.sites.size();
  if (n < 2) throw Error("J4 needs at least two sites (no interior edges)");
  MeritResult r;
  r.gradient.assign(2 * n, 0.0);
  r.per_cell.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto *edges = detail::single_piece_edges(dg.cells[i]);
    if (!edges) continue;
    int m = 0;
    for (const auto &e : *edges) m += e.kind == EdgeKind::interior;
    if (m == 0) continue;
    const double inv_m = 1.0 / m;
    const Point ai = dg.sites[i];
    double ji = 0.0;
    for (const auto &e : *edges) {
      if (e.kind != EdgeKind::interior) continue;
      const Point ak = dg.sites[static_cast<std::size_t>(e.neighbor)];
      const Point d = e.midpoint() - (ai + ak) * 0.5;
      const Point dw = e.w - e.v;
      const double L2 = norm2(dw);
      const double dd = norm2(d);
      ji += dd / L2;
      const Point mu = d / L2 + dw * (2.0 * dd / (L2 * L2));
      const Point eta = d / L2 - dw * (2.0 * dd / (L2 * L2));
      accumulate_F(r.gradient, dg.sites, e.v, e.v_class, mu, inv_m);
      accumulate_F(r.gradient, dg.sites, e.w, e.w_class, eta, inv_m);
      add_slot(r.gradient, static_cast<int>(i), d * (-inv_m / L2));
      add_slot(r.gradient, e.neighbor, d * (-inv_m / L2));
    }
    ji *= inv_m;
    r.per_cell[i] = ji;
    r.value += ji;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Field presets

namespace detail {

struct Circle {
  Point c;
  double r = 0.0;
  bool contains(Point p) const { return distance(p, c) <= r * (1 + 1e-12) + 1e-12; }
};

inline Circle circle_two(Point a, Point b) { return {(a + b) * 0.5, distance(a, b) * 0.5}; }

inline Circle circle_three(Point a, Point b, Point c) {
  const Point ab = b - a, ac = c - a;
  const double d = 2.0 * cross(ab, ac);
  if (std::abs(d) < 1e-300) {
    Circle best = circle_two(a, b);
    for (Circle alt : {circle_two(a, c), circle_two(b, c)})
      if (alt.r > best.r) best = alt;
    return best;
  }
  const Point off{(ac.y * norm2(ab) - ab.y * norm2(ac)) / d, (ab.x * norm2(ac) - ac.x * norm2(ab)) / d};
  return {a + off, norm(off)};
}

// Iterative Welzl on a fixed order; deterministic.
inline Circle enclosing_circle(std::vector<Point> pts) {
  if (pts.empty()) return {};
  Circle c{pts[0], 0.0};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (c.contains(pts[i])) continue;
    c = {pts[i], 0.0};
    for (std::size_t j = 0; j < i; ++j) {
      if (c.contains(pts[j])) continue;
      c = circle_two(pts[i], pts[j]);
      for (std::size_t k = 0; k < j; ++k)
        if (!c.contains(pts[k])) c = circle_three(pts[i], pts[j], pts[k]);
    }
  }
  return c;
}

} // namespace detail

/// Smallest circle containing every vertex of the region.
inline std::pair<Point, double> circumscribing_circle(const Region &region) {
  std::vector<Point> pts;
  for (const auto &poly : region.parts())
    for (Point p : poly.vertices()) pts.push_back(p);
  const auto c = detail::enclosing_circle(std::move(pts));
  return {c.c, c.r};
}

/// psi presets: "one", "paraboloid" (2.5 - 2|z - c|^2 / r^2 on the
/// circumscribing circle) and "rosenbrock_level" (0.25 inside a scaled
/// Rosenbrock level set, 1.075 outside, zero gradient).
inline FieldFunction make_field(std::string_view name, const Region &region) {
  FieldFunction f;
  f.name = std::string(name);
  if (name == "one") return f;
  if (name == "paraboloid") {
    const auto [c, r] = circumscribing_circle(region);
    const double r2 = r * r;
    f.value = [c, r2](Point z) { return 2.5 - 2.0 * norm2(z - c) / r2; };
    f.gradient = [c, r2](Point z) { return (z - c) * (-4.0 / r2); };
    return f;
  }
  if (name == "rosenbrock_level") {
    f.value = [](Point z) {
      const Point zb = Point{2.0, 2.0} + z * 0.4;
      const double u = zb.x / 4.0;
      const double g = (zb.y - u * u) * (zb.y - u * u) + (u - 1.0) * (u - 1.0);
      return g <= 1.0 ? 0.25 : 1.075;
    };
    f.gradient = [](Point) { return Point{}; };
    return f;
  }
  throw Error("unknown field function '" + std::string(name) + "' (expected one, paraboloid, rosenbrock_level)");
}

// ---------------------------------------------------------------------------
// Weighted objectives

struct ObjectiveTerm {
  int kind = 1; // 0..5
  double weight = 1.0;
  double delta = 0.1;
  NeighborMode mode = NeighborMode::automatic;
  /// c2 for J2, c3 for J3.
  double c = 0.5;
  std::string psi = "one";
};

struct ObjectiveSpec {
  std::vector<ObjectiveTerm> terms;

  bool needs_convex() const {
    for (const auto &t : terms)
      if (t.kind >= 2 && t.kind <= 4) return true;
    return false;
  }
};

inline const char *default_objective = "j0:10@delta=0.1,j1:1";

namespace detail {

inline double objective_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw Error("objective: bad number '" + std::string(s) + "' for " + std::string(what));
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= s.size(); ++k)
    if (k == s.size() || s[k] == sep) {
      out.push_back(s.substr(start, k - start));
      start = k + 1;
    }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

} // namespace detail

/// Parses e.g. `j0:10@delta=0.1,j1:1,j2:1@c2=0.4,j5:1@psi=paraboloid`.
/// Weight defaults to 1; further parameters chain with '@'.
/// Defaults: delta 0.1, c2 0.4, c3 0.5, psi one.
inline ObjectiveSpec parse_objective(std::string_view text) {
  ObjectiveSpec spec;
  for (std::string_view raw : detail::split(text, ',')) {
    const std::string_view item = detail::trim(raw);
    if (item.empty()) continue;
    const auto parts = detail::split(item, '@');
    const std::string_view head = detail::trim(parts[0]);
    const auto colon = head.find(':');
    const std::string_view name = head.substr(0, colon);
    if (name.size() != 2 || (name[0] != 'j' && name[0] != 'J') || name[1] < '0' || name[1] > '5')
      throw Error("objective: unknown term '" + std::string(name) + "' (expected j0..j5)");
    ObjectiveTerm t;
    t.kind = name[1] - '0';
    if (t.kind == 2) t.c = 0.4;
    if (colon != std::string_view::npos) t.weight = detail::objective_number(head.substr(colon + 1), "weight");
    if (!(t.weight >= 0.0)) throw Error("objective: weights must be non-negative");
    for (std::size_t k = 1; k < parts.size(); ++k) {
      const std::string_view kv = detail::trim(parts[k]);
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) throw Error("objective: expected key=value, got '" + std::string(kv) + "'");
      const std::string_view key = kv.substr(0, eq), val = kv.substr(eq + 1);
      if (key == "delta" && t.kind == 0) {
        t.delta = detail::objective_number(val, key);
        if (!(t.delta > 0.0)) throw Error("objective: delta must be positive");
      } else if (key == "mode" && t.kind == 0) {
        if (val == "delaunay_neighbors")
          t.mode = NeighborMode::delaunay_neighbors;
        else if (val == "all_pairs")
          t.mode = NeighborMode::all_pairs;
        else if (val == "auto")
          t.mode = NeighborMode::automatic;
        else
          throw Error("objective: unknown J0 mode '" + std::string(val) + "'");
      } else if ((key == "c2" && t.kind == 2) || (key == "c3" && t.kind == 3)) {
        t.c = detail::objective_number(val, key);
        if (!(t.c > 0.0 && t.c < 1.0)) throw Error("objective: " + std::string(key) + " must lie in (0, 1)");
      } else if (key == "psi" && t.kind == 5) {
        t.psi = std::string(val);
      } else {
        throw Error("objective: parameter '" + std::string(key) + "' does not apply to " + std::string(name));
      }
    }
    spec.terms.push_back(t);
  }
  if (spec.terms.empty()) throw Error("objective: no terms");
  return spec;
}

inline std::string to_string(const ObjectiveSpec &spec) {
  std::string out;
  char buf[64];
  for (const auto &t : spec.terms) {
    if (!out.empty()) out += ',';
    std::snprintf(buf, sizeof buf, "j%d:%.17g", t.kind, t.weight);
    out += buf;
    if (t.kind == 0) {
      std::snprintf(buf, sizeof buf, "@delta=%.17g", t.delta);
      out += buf;
      if (t.mode == NeighborMode::all_pairs) out += "@mode=all_pairs";
      if (t.mode == NeighborMode::delaunay_neighbors) out += "@mode=delaunay_neighbors";
    } else if (t.kind == 2 || t.kind == 3) {
      std::snprintf(buf, sizeof buf, "@c%d=%.17g", t.kind, t.c);
      out += buf;
    } else if (t.kind == 5) {
      out += "@psi=" + t.psi;
    }
  }
  return out;
}

struct TermValue {
  int kind;
  double weight;
  /// Unweighted J value.
  double value;
  std::vector<double> per_cell;
};

struct Evaluation {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<TermValue> terms;
  double kink_margin = std::numeric_limits<double>::infinity();
  Diagram diagram;
};

/// A parsed objective bound to a region, with field functions resolved once.
class Objective {
public:
  Objective(ObjectiveSpec spec, Region region) : spec_(std::move(spec)), region_(std::move(region)) {
    if (spec_.needs_convex() && region_.part_count() != 1)
      throw Error("J2, J3 and J4 need a convex region (one part); this region has " +
                  std::to_string(region_.part_count()) + " parts");
    for (const auto &t : spec_.terms) fields_.push_back(t.kind == 5 ? make_field(t.psi, region_) : FieldFunction{});
  }

  const ObjectiveSpec &spec() const { return spec_; }
  const Region &region() const { return region_; }

  MeritResult term(std::size_t k, const Diagram &dg) const {
    const ObjectiveTerm &t = spec_.terms[k];
    switch (t.kind) {
    case 0: return eval_J0(dg, t.delta, t.mode);
    case 1: return eval_J1(dg);
    case 2: return eval_J2(dg, t.c);
    case 3: return eval_J3(dg, t.c);
    case 4: return eval_J4(dg);
    default: return eval_J5(dg, fields_[k]);
    }
  }

  /// f = sum rho_l J^l and its gradient, sharing one diagram build.
  Evaluation evaluate(std::span<const Point> sites) const {
    Evaluation ev;
    ev.diagram = build_diagram(sites, region_);
    ev.gradient.assign(2 * sites.size(), 0.0);
    for (std::size_t k = 0; k < spec_.terms.size(); ++k) {
      const double w = spec_.terms[k].weight;
      MeritResult r = term(k, ev.diagram);
      ev.value += w * r.value;
      for (std::size_t s = 0; s < ev.gradient.size(); ++s) ev.gradient[s] += w * r.gradient[s];
      if (w != 0.0) ev.kink_margin = std::min(ev.kink_margin, r.kink_margin);
      ev.terms.push_back({spec_.terms[k].kind, w, r.value, std::move(r.per_cell)});
    }
    return ev;
  }

  Evaluation evaluate(std::span<const double> flat) const {
    const auto pts = unflatten(flat);
    return evaluate(std::span<const Point>(pts));
  }

private:
  ObjectiveSpec spec_;
  Region region_;
  std::vector<FieldFunction> fields_;
};

inline Evaluation eval_objective(std::span<const Point> sites, const Region &region, const ObjectiveSpec &spec) {
  return Objective(spec, region).evaluate(sites);
}

} // namespace vtailor
