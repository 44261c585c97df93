#pragma once

// First-order velocities of diagram vertices under site perturbations, and
// the resulting derivatives of edge lengths and cell areas.
//
// Gradients are flat vectors of 2κ entries; slots 2i, 2i+1 hold d/d(a_i).

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "diagram.hpp"
#include "geom.hpp"

namespace vtailor {

struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0; // [[a, b], [c, d]]

  static constexpr Mat2 identity() { return {1, 0, 0, 1}; }
  /// u w^T
  static constexpr Mat2 outer(Point u, Point w) { return {u.x * w.x, u.x * w.y, u.y * w.x, u.y * w.y}; }

  constexpr Point operator*(Point p) const { return {a * p.x + b * p.y, c * p.x + d * p.y}; }
  constexpr Mat2 transposed() const { return {a, c, b, d}; }
  constexpr Mat2 operator+(const Mat2 &o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
  constexpr Mat2 operator-(const Mat2 &o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
  constexpr Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
  double max_abs() const { return std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)}); }
};

/// A sensitivity denominator fell below eps_reg at `where`.
class SingularityError : public GeometryError {
public:
  SingularityError(const std::string &what, Point where)
      : GeometryError(what + " at (" + std::to_string(where.x) + ", " + std::to_string(where.y) + ")"), where_(where) {}
  Point where() const { return where_; }

private:
  Point where_;
};

/// det[(a_j - a_i); (a_k - a_i)].
constexpr double circum_det(Point ai, Point aj, Point ak) { return cross(aj - ai, ak - ai); }

/// Velocity of the circumcenter v of (a_i, a_j, a_k) per unit motion of a_k:
/// (a_i - a_j)^perp (v - a_k)^T / Q(i,j,k).
inline Mat2 interior_vertex_matrix(Point v, Point ai, Point aj, Point ak) {
  const double q = circum_det(ai, aj, ak);
  if (!(std::abs(q) > eps_reg)) throw SingularityError("collinear sites at interior vertex", v);
  return Mat2::outer(perp(ai - aj), v - ak) * (1.0 / q);
}

/// Velocity of v = bisector(a_i, a_j) on a fixed line with unit normal n,
/// per unit motion of a_i: -n^perp (v - a_i)^T / det[(a_j - a_i); n].
inline Mat2 boundary_vertex_matrix(Point v, Point ai, Point aj, Point n) {
  const double det = cross(aj - ai, n);
  if (!(std::abs(det) > eps_reg)) throw SingularityError("bisector parallel to boundary", v);
  return Mat2::outer(-perp(n), v - ai) * (1.0 / det);
}

/// Jacobian blocks d(v)/d(a_slot) for a vertex of the given class; fixed vertices have none.
inline std::vector<std::pair<int, Mat2>> vertex_jacobian(std::span<const Point> sites, Point v, const VertexClass &cls) {
  auto at = [&](int k) { return sites[static_cast<std::size_t>(k)]; };
  std::vector<std::pair<int, Mat2>> out;
  if (const auto *iv = std::get_if<InteriorVertex>(&cls)) {
    const int i = iv->site, l1 = iv->first, l2 = iv->second;
    out.emplace_back(i, interior_vertex_matrix(v, at(l1), at(l2), at(i)));
    out.emplace_back(l1, interior_vertex_matrix(v, at(l2), at(i), at(l1)));
    out.emplace_back(l2, interior_vertex_matrix(v, at(i), at(l1), at(l2)));
  } else if (const auto *bv = std::get_if<BoundaryVertex>(&cls)) {
    out.emplace_back(bv->site, boundary_vertex_matrix(v, at(bv->site), at(bv->other), bv->normal));
    out.emplace_back(bv->other, boundary_vertex_matrix(v, at(bv->other), at(bv->site), bv->normal));
  } else if (const auto *sv = std::get_if<SeamVertex>(&cls)) {
    out.emplace_back(sv->site, boundary_vertex_matrix(v, at(sv->site), at(sv->other), sv->normal));
    out.emplace_back(sv->other, boundary_vertex_matrix(v, at(sv->other), at(sv->site), sv->normal));
  }
  return out;
}

inline void add_slot(std::span<double> grad, int k, Point g) {
  grad[2 * static_cast<std::size_t>(k)] += g.x;
  grad[2 * static_cast<std::size_t>(k) + 1] += g.y;
}

/// grad += weight * d(v . zeta)/da, zeta held fixed. Region corners add nothing.
inline void accumulate_F(std::span<double> grad, std::span<const Point> sites, Point v, const VertexClass &cls,
                         Point zeta, double weight) {
  if (weight == 0.0 || std::holds_alternative<CornerVertex>(cls)) return;
  for (const auto &[k, m] : vertex_jacobian(sites, v, cls)) add_slot(grad, k, m.transposed() * zeta * weight);
}

/// grad += weight * d|E|/da.
inline void edge_length_gradient(std::span<double> grad, std::span<const Point> sites, const CellEdge &e,
                                 double weight) {
  const double len = e.length();
  if (!(len > 0.0)) throw SingularityError("zero-length edge", e.v);
  const Point tau = (e.w - e.v) / len;
  accumulate_F(grad, sites, e.w, e.w_class, tau, weight);
  accumulate_F(grad, sites, e.v, e.v_class, tau, -weight);
}

/// grad += weight * d|V_i|/da. Only interior edges move the cell boundary normally.
inline void cell_area_gradient(std::span<double> grad, const Diagram &dg, std::size_t i, double weight) {
  if (weight == 0.0) return;
  const Point ai = dg.sites[i];
  for (const auto &pc : dg.cells[i].pieces)
    for (const auto &e : pc.edges) {
      if (e.kind != EdgeKind::interior) continue;
      const Point ak = dg.sites[static_cast<std::size_t>(e.neighbor)];
      const double sep = distance(ai, ak);
      if (!(sep > 0.0)) throw SingularityError("coincident sites", ai);
      const double s = weight * e.length() / sep;
      const Point p = e.midpoint();
      add_slot(grad, static_cast<int>(i), (p - ai) * s);
      add_slot(grad, e.neighbor, (p - ak) * -s);
    }
}

} // namespace vtailor
