#pragma once

// Planar primitives: points, convex polygons, half-planes and
// Sutherland-Hodgman clipping with per-edge provenance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace vtailor {

/// Absolute tolerance for vertex coincidence and on-line tests.
inline constexpr double eps_geom = 1e-9;
/// Margin below which a configuration is considered degenerate for gradients.
inline constexpr double eps_reg = 1e-7;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class GeometryError : public Error {
public:
  using Error::Error;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  constexpr Point &operator+=(Point o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Point &operator-=(Point o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Point &operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator-(Point a) { return {-a.x, -a.y}; }
  friend constexpr Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
  friend constexpr Point operator*(double s, Point a) { return {a.x * s, a.y * s}; }
  friend constexpr Point operator/(Point a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(Point, Point) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(Point a) { return dot(a, a); }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// Counterclockwise rotation by pi/2: (x, y) -> (-y, x).
constexpr Point perp(Point v) { return {-v.y, v.x}; }

/// Twice the signed area of triangle abc; positive when abc is CCW.
constexpr double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct BoundingBox {
  Point lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  Point hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

  void expand(Point p) {
    lo.x = std::min(lo.x, p.x);
    lo.y = std::min(lo.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  void expand(const BoundingBox &b) {
    if (!b.empty()) {
      expand(b.lo);
      expand(b.hi);
    }
  }
  bool empty() const { return lo.x > hi.x || lo.y > hi.y; }
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  Point center() const { return (lo + hi) * 0.5; }
  bool overlaps(const BoundingBox &o, double pad = 0.0) const {
    return !(o.lo.x > hi.x + pad || o.hi.x < lo.x - pad || o.lo.y > hi.y + pad || o.hi.y < lo.y - pad);
  }
};

inline BoundingBox bounds_of(std::span<const Point> pts) {
  BoundingBox b;
  for (Point p : pts) b.expand(p);
  return b;
}

/// Shoelace area of a closed ring, evaluated relative to the first vertex.
inline double signed_area(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 3) return 0.0;
  const Point o = ring[0];
  double twice = 0.0;
  for (std::size_t t = 1; t + 1 < n; ++t) twice += cross(ring[t] - o, ring[t + 1] - o);
  return 0.5 * twice;
}

inline double perimeter(std::span<const Point> ring) {
  const std::size_t n = ring.size();
  if (n < 2) return 0.0;
  double len = 0.0;
  for (std::size_t t = 0; t < n; ++t) len += distance(ring[t], ring[(t + 1) % n]);
  return len;
}

/// Strictly convex, counterclockwise polygon with at least three vertices.
class ConvexPolygon {
public:
  ConvexPolygon() = default;

  /// Validates orientation, convexity and vertex distinctness; throws GeometryError.
  explicit ConvexPolygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (auto why = defect(vertices_)) throw GeometryError("invalid convex polygon: " + *why);
  }

  /// Wraps vertices already known to satisfy the invariants.
  static ConvexPolygon unchecked(std::vector<Point> vertices) {
    ConvexPolygon p;
    p.vertices_ = std::move(vertices);
    return p;
  }

  /// Reason the ring violates the polygon invariants, or nullopt if it is valid.
  static std::optional<std::string> defect(std::span<const Point> v) {
    const std::size_t n = v.size();
    if (n < 3) return "fewer than 3 vertices";
    for (Point p : v)
      if (!is_finite(p)) return "non-finite coordinate";
    for (std::size_t t = 0; t < n; ++t)
      if (distance(v[t], v[(t + 1) % n]) <= eps_geom) return "repeated vertex";
    if (signed_area(v) <= 0.0) return "orientation is not counterclockwise";
    for (std::size_t t = 0; t < n; ++t) {
      const Point a = v[t], b = v[(t + 1) % n], c = v[(t + 2) % n];
      const double scale = std::max(1.0, distance(a, b) * distance(b, c));
      if (orient(a, b, c) <= -eps_geom * scale) return "not convex";
    }
    return std::nullopt;
  }

  const std::vector<Point> &vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Point &operator[](std::size_t t) const { return vertices_[t]; }
  BoundingBox bounds() const { return bounds_of(vertices_); }

  /// Closed containment test with absolute slack `tol`.
  bool contains(Point p, double tol = 0.0) const {
    const std::size_t n = vertices_.size();
    for (std::size_t t = 0; t < n; ++t) {
      const Point a = vertices_[t], b = vertices_[(t + 1) % n];
      const double len = distance(a, b);
      if (orient(a, b, p) < -tol * len) return false;
    }
    return n >= 3;
  }

private:
  std::vector<Point> vertices_;
};

inline double signed_area(const ConvexPolygon &poly) { return signed_area(poly.vertices()); }
inline double perimeter(const ConvexPolygon &poly) { return perimeter(poly.vertices()); }

/// The closed half-plane {x : normal . x <= offset} with a unit normal.
struct HalfPlane {
  Point normal{1.0, 0.0};
  double offset = 0.0;

  /// Normalizes `n`; throws GeometryError for a zero normal.
  static HalfPlane from_normal(Point n, double c) {
    const double len = norm(n);
    if (!(len > 0.0) || !std::isfinite(len)) throw GeometryError("half-plane normal must be non-zero");
    return {n / len, c / len};
  }

  /// Points at least as close to `keep` as to `other`.
  static HalfPlane bisector(Point keep, Point other) {
    const Point d = other - keep;
    const double len = norm(d);
    if (!(len > 0.0)) throw GeometryError("bisector of coincident points");
    const Point n = d / len;
    return {n, dot(n, (keep + other) * 0.5)};
  }

  double excess(Point p) const { return dot(normal, p) - offset; }
  HalfPlane complement() const { return {-normal, -offset}; }
};

/// Supporting line of one polygon edge: either an edge of the input polygon
/// or a clipping half-plane.
struct EdgeTag {
  enum class Source : std::uint8_t { polygon, halfplane };
  Source source = Source::polygon;
  int id = -1;

  friend constexpr bool operator==(EdgeTag, EdgeTag) = default;
};

/// Convex polygon whose edge t (vertices[t] -> vertices[t+1]) carries tags[t].
struct TaggedPolygon {
  std::vector<Point> vertices;
  std::vector<EdgeTag> tags;

  static TaggedPolygon from(const ConvexPolygon &poly) {
    TaggedPolygon out;
    out.vertices = poly.vertices();
    out.tags.reserve(poly.size());
    for (std::size_t t = 0; t < poly.size(); ++t)
      out.tags.push_back({EdgeTag::Source::polygon, static_cast<int>(t)});
    return out;
  }

  double area() const { return signed_area(vertices); }
  std::size_t size() const { return vertices.size(); }
};

namespace detail {

// Drops zero-length edges; the merged vertex keeps the incoming tag of the
// first endpoint and the outgoing tag of the second.
inline void remove_short_edges(TaggedPolygon &poly) {
  bool changed = true;
  while (changed && poly.vertices.size() >= 2) {
    changed = false;
    const std::size_t n = poly.vertices.size();
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t u = (t + 1) % n;
      if (distance(poly.vertices[t], poly.vertices[u]) <= eps_geom) {
        poly.vertices.erase(poly.vertices.begin() + static_cast<std::ptrdiff_t>(t));
        poly.tags.erase(poly.tags.begin() + static_cast<std::ptrdiff_t>(t));
        changed = true;
        break;
      }
    }
  }
}

} // namespace detail

/// Intersection of `poly` with the half-plane; the edge created along the
/// clip line is tagged {halfplane, halfplane_id}. Returns nullopt when the
/// result is empty or has area below eps_geom^2.
inline std::optional<TaggedPolygon> clip_halfplane(const TaggedPolygon &poly, const HalfPlane &h,
                                                   int halfplane_id) {
  const std::size_t n = poly.vertices.size();
  if (n < 3) return std::nullopt;

  thread_local std::vector<double> excess;
  excess.resize(n);
  bool any_out = false, any_in = false;
  for (std::size_t t = 0; t < n; ++t) {
    excess[t] = h.excess(poly.vertices[t]);
    if (excess[t] > 0.0)
      any_out = true;
    else
      any_in = true;
  }
  if (!any_out) return poly;
  if (!any_in) return std::nullopt;

  const EdgeTag cut{EdgeTag::Source::halfplane, halfplane_id};
  TaggedPolygon out;
  out.vertices.reserve(n + 1);
  out.tags.reserve(n + 1);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t u = (t + 1) % n;
    const Point cur = poly.vertices[t], nxt = poly.vertices[u];
    const bool cur_in = excess[t] <= 0.0, nxt_in = excess[u] <= 0.0;
    if (cur_in) {
      out.vertices.push_back(cur);
      out.tags.push_back(poly.tags[t]);
      if (!nxt_in) {
        const double s = excess[t] / (excess[t] - excess[u]);
        out.vertices.push_back(cur + (nxt - cur) * s);
        out.tags.push_back(cut);
      }
    } else if (nxt_in) {
      const double s = excess[t] / (excess[t] - excess[u]);
      out.vertices.push_back(cur + (nxt - cur) * s);
      out.tags.push_back(poly.tags[t]);
    }
  }
  detail::remove_short_edges(out);
  if (out.vertices.size() < 3 || out.area() < eps_geom * eps_geom) return std::nullopt;
  return out;
}

inline std::optional<ConvexPolygon> clip_halfplane(const ConvexPolygon &poly, const HalfPlane &h) {
  auto clipped = clip_halfplane(TaggedPolygon::from(poly), h, 0);
  if (!clipped) return std::nullopt;
  return ConvexPolygon::unchecked(std::move(clipped->vertices));
}

} // namespace vtailor
