#pragma once

// Polygonal regions A = A_1 u ... u A_p given as convex parts with disjoint
// interiors. Shared edges between parts are seams; everything else is the
// boundary of A, stored as segments with outward normals.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "geom.hpp"

namespace vtailor {

class ParseError : public Error {
public:
  ParseError(const std::string &source, int line, const std::string &what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

struct BoundarySegment {
  Point from, to;
  Point outward_normal;
  int part = -1;
  int part_edge = -1;
  // Parameter range covered on the part edge, 0 at its start vertex.
  double t0 = 0.0, t1 = 1.0;
};

class Region {
public:
  Region() = default;

  /// Validates pairwise-disjoint interiors and derives the boundary; throws GeometryError.
  explicit Region(std::vector<ConvexPolygon> parts) : parts_(std::move(parts)) {
    if (parts_.empty()) throw GeometryError("region has no parts");
    area_ = 0.0;
    for (const auto &p : parts_) {
      area_ += signed_area(p);
      bounds_.expand(p.bounds());
    }
    if (!(area_ > 0.0)) throw GeometryError("region has zero area");
    check_disjoint();
    derive_boundary();
    check_closed();
  }

  const std::vector<ConvexPolygon> &parts() const { return parts_; }
  std::size_t part_count() const { return parts_.size(); }
  double area() const { return area_; }
  const BoundingBox &bounds() const { return bounds_; }
  const std::vector<BoundarySegment> &boundary() const { return boundary_; }
  bool is_convex() const { return parts_.size() == 1; }

  /// Distinct vertices of parts lying on the boundary of A.
  const std::vector<Point> &corners() const { return corners_; }

  /// Boundary segment id covering point `p` on edge `edge` of part `part`, or -1 on a seam.
  int boundary_segment_at(int part, int edge, Point p) const {
    const auto &ids = edge_segments_[static_cast<std::size_t>(part)][static_cast<std::size_t>(edge)];
    if (ids.empty()) return -1;
    const auto &poly = parts_[static_cast<std::size_t>(part)];
    const Point a = poly[static_cast<std::size_t>(edge)];
    const Point b = poly[(static_cast<std::size_t>(edge) + 1) % poly.size()];
    const double t = dot(p - a, b - a) / norm2(b - a);
    const double slack = eps_geom / norm(b - a);
    for (int id : ids) {
      const auto &s = boundary_[static_cast<std::size_t>(id)];
      if (t >= s.t0 - slack && t <= s.t1 + slack) return id;
    }
    return -1;
  }

  bool contains(Point p, double tol = 0.0) const {
    for (const auto &poly : parts_)
      if (poly.contains(p, tol)) return true;
    return false;
  }

  Region scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw GeometryError("scale factor must be positive");
    std::vector<ConvexPolygon> parts;
    parts.reserve(parts_.size());
    for (const auto &poly : parts_) {
      std::vector<Point> v = poly.vertices();
      for (auto &q : v) q *= factor;
      parts.push_back(ConvexPolygon::unchecked(std::move(v)));
    }
    return Region(std::move(parts));
  }

private:
  void check_disjoint() const {
    for (std::size_t j = 0; j < parts_.size(); ++j) {
      for (std::size_t k = j + 1; k < parts_.size(); ++k) {
        if (!parts_[j].bounds().overlaps(parts_[k].bounds())) continue;
        std::optional<ConvexPolygon> common = parts_[j];
        const auto &other = parts_[k];
        for (std::size_t t = 0; t < other.size() && common; ++t) {
          const Point a = other[t], b = other[(t + 1) % other.size()];
          const Point outward{b.y - a.y, a.x - b.x};
          common = clip_halfplane(*common, HalfPlane::from_normal(outward, dot(outward, a)));
        }
        if (!common) continue;
        const double overlap = signed_area(*common);
        const double scale = std::min(signed_area(parts_[j]), signed_area(other));
        if (overlap > 1e-9 * scale)
          throw GeometryError("region parts " + std::to_string(j + 1) + " and " + std::to_string(k + 1) +
                              " overlap");
      }
    }
  }

  // Portions of each part edge covered by an opposite collinear edge of
  // another part are seams; the remainder becomes boundary segments.
  void derive_boundary() {
    edge_segments_.assign(parts_.size(), {});
    for (std::size_t j = 0; j < parts_.size(); ++j) {
      const auto &poly = parts_[j];
      edge_segments_[j].assign(poly.size(), {});
      for (std::size_t e = 0; e < poly.size(); ++e) {
        const Point a = poly[e], b = poly[(e + 1) % poly.size()];
        const Point d = b - a;
        const double len = norm(d);
        const double tol = eps_geom * std::max(1.0, len);
        std::vector<std::pair<double, double>> covered;
        for (std::size_t k = 0; k < parts_.size(); ++k) {
          if (k == j) continue;
          const auto &q = parts_[k];
          for (std::size_t f = 0; f < q.size(); ++f) {
            const Point r = q[f], s = q[(f + 1) % q.size()];
            if (dot(s - r, d) >= 0.0) continue;
            if (std::abs(cross(d, r - a)) > tol * len || std::abs(cross(d, s - a)) > tol * len) continue;
            double tr = dot(r - a, d) / (len * len), ts = dot(s - a, d) / (len * len);
            if (tr > ts) std::swap(tr, ts);
            const double lo = std::max(0.0, tr), hi = std::min(1.0, ts);
            if (hi - lo > eps_geom / len) covered.emplace_back(lo, hi);
          }
        }
        std::sort(covered.begin(), covered.end());
        double cursor = 0.0;
        auto emit = [&](double t0, double t1) {
          if (t1 - t0 <= eps_geom / len) return;
          BoundarySegment seg;
          seg.from = a + d * t0;
          seg.to = a + d * t1;
          seg.outward_normal = Point{d.y, -d.x} / len;
          seg.part = static_cast<int>(j);
          seg.part_edge = static_cast<int>(e);
          seg.t0 = t0;
          seg.t1 = t1;
          edge_segments_[j][e].push_back(static_cast<int>(boundary_.size()));
          boundary_.push_back(seg);
        };
        for (auto [lo, hi] : covered) {
          if (lo > cursor) emit(cursor, lo);
          cursor = std::max(cursor, hi);
        }
        if (cursor < 1.0) emit(cursor, 1.0);
      }
    }
    for (const auto &poly : parts_) {
      for (Point v : poly.vertices()) {
        bool on_boundary = false;
        for (const auto &s : boundary_)
          if (distance(s.from, v) <= eps_geom || distance(s.to, v) <= eps_geom) on_boundary = true;
        if (!on_boundary) continue;
        bool seen = false;
        for (Point c : corners_)
          if (distance(c, v) <= eps_geom) seen = true;
        if (!seen) corners_.push_back(v);
      }
    }
  }

  void check_closed() const {
    std::vector<Point> ends;
    for (const auto &s : boundary_) {
      ends.push_back(s.from);
      ends.push_back(s.to);
    }
    for (Point p : ends) {
      int count = 0;
      for (Point q : ends)
        if (distance(p, q) <= 1e3 * eps_geom) ++count;
      if (count % 2 != 0)
        throw GeometryError("region boundary is not closed near (" + std::to_string(p.x) + ", " +
                            std::to_string(p.y) + ")");
    }
  }

  std::vector<ConvexPolygon> parts_;
  double area_ = 0.0;
  BoundingBox bounds_;
  std::vector<BoundarySegment> boundary_;
  std::vector<std::vector<std::vector<int>>> edge_segments_;
  std::vector<Point> corners_;
};

inline double signed_area(const Region &r) { return r.area(); }

/// round(sqrt(kappa/|A|) * 64) / 64.
inline double suggest_scale(const Region &region, int kappa) {
  if (kappa < 1) throw Error("kappa must be at least 1");
  if (!(region.area() > 0.0)) throw GeometryError("empty region");
  return std::round(std::sqrt(kappa / region.area()) * 64.0) / 64.0;
}

struct RegionPreset {
  std::string name;
  Region region;
  // kappa -> reference scaling factor: the dyadic value (a multiple of 1/128)
  // whose 6-digit rendering is the tabulated one.
  std::map<int, double> table_scale;
  // kappa -> |A| after scaling, as printed in the reference tables.
  std::map<int, double> table_area;
};

namespace detail {

inline ConvexPolygon poly(std::initializer_list<Point> pts) { return ConvexPolygon(std::vector<Point>(pts)); }

inline Region letter_a() {
  std::vector<ConvexPolygon> p;
  p.push_back(poly({{-0.1, 0}, {8.2, 0}, {8.2, 0.62}, {6.92, 0.76}, {1, 0.8}, {-0.1, 0.6}}));
  p.push_back(poly({{1, 0.8}, {6.92, 0.76}, {5.86, 1.32}, {2, 1.5}}));
  p.push_back(poly({{2, 1.5}, {5.86, 1.32}, {5.24, 2.65}, {3.5, 4.36}}));
  p.push_back(poly({{5.24, 2.65}, {5.58, 4.36}, {3.5, 4.36}}));
  p.push_back(poly({{3.5, 4.36}, {5.58, 4.36}, {7.58, 9}, {5.5, 9}}));
  p.push_back(poly({{5.5, 9}, {7.58, 9}, {8.4, 10.91}, {6.32, 10.91}}));
  p.push_back(poly({{6.32, 10.91}, {8.4, 10.91}, {14.02, 23.95}, {11.94, 23.95}}));
  p.push_back(poly({{11.94, 23.95}, {18.72, 23.95}, {15.89, 30.56}, {14.79, 30.56}}));
  p.push_back(poly({{19.6, 10.91}, {24.3, 10.91}, {18.72, 23.95}, {14.02, 23.95}}));
  p.push_back(poly({{7.58, 9}, {20.42, 9}, {19.6, 10.91}, {8.4, 10.91}}));
  p.push_back(poly({{20.42, 9}, {25.12, 9}, {24.3, 10.91}, {19.6, 10.91}}));
  p.push_back(poly({{22.06, 5.15}, {26.54, 6}, {25.12, 9}, {20.42, 9}}));
  p.push_back(poly({{22.46, 2.26}, {28.53, 2.3}, {26.54, 6}, {22.06, 5.15}}));
  p.push_back(poly({{22.05, 1.2}, {29.6, 1.22}, {28.53, 2.3}, {22.46, 2.26}}));
  p.push_back(poly({{21.24, 0.82}, {30.79, 0.74}, {29.6, 1.22}, {22.05, 1.2}}));
  p.push_back(poly({{19.13, 0}, {32.15, 0}, {32.15, 0.6}, {30.79, 0.74}, {21.24, 0.82}, {19.13, 0.6}}));
  return Region(std::move(p));
}

inline Region key() {
  std::vector<ConvexPolygon> p;
  p.push_back(poly({{0, 0}, {0, -3.44}, {2.49, -3.44}, {3, -3}, {3, 0}}));
  p.push_back(poly({{0, -3.44}, {0, -4.5}, {1.58, -4.5}, {2.49, -3.74}, {2.49, -3.44}}));
  p.push_back(poly({{0, -4.5}, {0, -4.79}, {1.58, -4.79}, {1.58, -4.5}}));
  p.push_back(poly({{0, -4.79}, {0, -5.48}, {1.87, -5.48}, {2, -5.4}, {2, -5.14}, {1.58, -4.79}}));
  p.push_back(poly({{0, -5.48}, {0, -5.86}, {1.87, -5.86}, {1.87, -5.48}}));
  p.push_back(poly({{0, -5.86}, {0, -6.9}, {2.26, -6.9}, {2.42, -6.76}, {2.42, -6.51}, {1.87, -5.86}}));
  p.push_back(poly({{0, -6.9}, {0, -7.22}, {2.26, -7.22}, {2.26, -6.9}}));
  p.push_back(poly({{0, -7.22}, {0, -7.98}, {2.1, -7.98}, {2.43, -7.65}, {2.43, -7.4}, {2.26, -7.22}}));
  p.push_back(poly({{0, -7.98}, {0, -8.2}, {2.1, -8.2}, {2.1, -7.98}}));
  p.push_back(poly({{0, -8.2}, {0, -8.87}, {2.26, -8.87}, {2.43, -8.74}, {2.43, -8.49}, {2.1, -8.2}}));
  p.push_back(poly({{0, -8.87}, {0, -9.17}, {2.26, -9.17}, {2.26, -8.87}}));
  p.push_back(poly({{0, -9.17}, {0, -10.15}, {1.87, -10.15}, {2.43, -9.62}, {2.43, -9.28}, {2.26, -9.17}}));
  p.push_back(poly({{0, -10.15}, {0, -10.5}, {0.37, -10.9}, {0.94, -10.9}, {1.87, -10.35}, {1.87, -10.15}}));
  p.push_back(poly({{0.94, -10.9}, {1.29, -11.35}, {1.86, -11.12}, {2.26, -10.7}, {1.87, -10.35}}));
  p.push_back(poly({{0.85, 6.06}, {0.58, 6.68}, {-0.51, 6.53}, {-3, 6}, {-3.6, 3.5}, {-3, 0.7}, {0, 0}}));
  p.push_back(poly({{1.5, 5.86}, {0.85, 6.06}, {0, 0}, {3, 0}}));
  p.push_back(poly({{1.5, 5.86}, {3, 0}, {2.15, 6.06}}));
  p.push_back(poly({{2.15, 6.06}, {3, 0}, {6, 0.7}, {6.6, 3.35}, {6, 6}, {3.51, 6.53}, {2.42, 6.68}}));
  p.push_back(poly({{0.58, 6.68}, {0.85, 7.3}, {0.69, 8.16}, {0, 7.62}, {-0.51, 6.53}}));
  p.push_back(poly({{0.85, 7.3}, {1.5, 7.5}, {1.5, 8.5}, {0.69, 8.16}}));
  p.push_back(poly({{1.5, 7.5}, {2.15, 7.3}, {2.31, 8.16}, {1.5, 8.5}}));
  p.push_back(poly({{2.42, 6.68}, {3.51, 6.53}, {3, 7.62}, {2.31, 8.16}, {2.15, 7.3}}));
  return Region(std::move(p));
}

inline Region regular_polygon(int n_vert = 20) {
  std::vector<Point> v;
  v.reserve(static_cast<std::size_t>(n_vert));
  for (int i = 0; i < n_vert; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / n_vert;
    v.push_back({std::cos(theta), std::sin(theta)});
  }
  std::vector<ConvexPolygon> p;
  p.push_back(ConvexPolygon(std::move(v)));
  return Region(std::move(p));
}

inline Region convex_hexagon() {
  std::vector<ConvexPolygon> p;
  p.push_back(poly({{0.65, 2.31}, {-1.98, 2.71}, {-3.35, 1.64}, {-2.59, -0.34}, {-0.22, -1.07}, {0.54, 0.72}}));
  return Region(std::move(p));
}

} // namespace detail

inline const std::vector<std::string> &preset_names() {
  static const std::vector<std::string> names{"letter_a", "key", "regular_polygon", "convex_hexagon"};
  return names;
}

/// Built-in region with its reference scaling factors; throws Error for unknown names.
inline RegionPreset preset(std::string_view name) {
  if (name == "letter_a")
    return {"letter_a", detail::letter_a(), {{100, 0.65625}, {1000, 2.078125}}, {{100, 100.143}, {1000, 1004.21}}};
  if (name == "key")
    return {"key", detail::key(), {{100, 1.0625}, {1000, 3.3671875}}, {{100, 99.5155}, {1000, 999.464}}};
  if (name == "regular_polygon")
    return {"regular_polygon",
            detail::regular_polygon(),
            {{100, 5.703125},
             {500, 12.71875},
             {1000, 17.953125},
             {5000, 40.375},
             {10000, 57.109375},
             {20000, 80.375},
             {30000, 98.234375},
             {40000, 114.109375},
             {50000, 127.0078125}},
            {{100, 100.510},
             {500, 499.886},
             {1000, 996.007},
             {5000, 5037.41},
             {10000, 10078.5},
             {20000, 19962.9},
             {30000, 29820.1},
             {40000, 40236.9},
             {50000, 49847.5}}};
  if (name == "convex_hexagon")
    return {"convex_hexagon", detail::convex_hexagon(), {{100, 3.0625}, {1000, 9.671875}}, {{100, 100.582}, {1000, 1003.20}}};
  throw Error("unknown region preset '" + std::string(name) + "'");
}

inline Region builtin(std::string_view name) { return preset(name).region; }

/// Parsed region plus non-fatal diagnostics (e.g. reoriented polygons).
struct RegionFile {
  Region region;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <class T> bool parse_number(std::string_view tok, T &out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc{} && ptr == tok.data() + tok.size();
}

} // namespace detail

/// Reads the region text format: a polygon count, then per polygon a vertex
/// count followed by that many "x y" lines. '#' starts a comment.
inline RegionFile parse_region(std::istream &in, const std::string &source = "<region>") {
  struct Line {
    int number;
    std::vector<std::string_view> tokens;
  };
  std::vector<std::string> storage;
  std::vector<int> numbers;
  {
    std::string raw;
    int n = 0;
    while (std::getline(in, raw)) {
      ++n;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      storage.push_back(raw);
      numbers.push_back(n);
    }
  }
  std::vector<Line> lines;
  for (std::size_t k = 0; k < storage.size(); ++k) {
    auto toks = detail::split_ws(storage[k]);
    if (!toks.empty()) lines.push_back({numbers[k], std::move(toks)});
  }

  std::size_t cursor = 0;
  const int last_line = numbers.empty() ? 0 : numbers.back();
  auto next = [&](const std::string &expect) -> const Line & {
    if (cursor >= lines.size()) throw ParseError(source, last_line, "unexpected end of file, expected " + expect);
    return lines[cursor++];
  };

  const Line &head = next("polygon count");
  long count = 0;
  if (head.tokens.size() != 1 || !detail::parse_number(head.tokens[0], count) || count < 1)
    throw ParseError(source, head.number, "expected a positive polygon count");

  RegionFile result;
  std::vector<ConvexPolygon> parts;
  for (long j = 0; j < count; ++j) {
    const std::string label = "polygon " + std::to_string(j + 1);
    const Line &mline = next(label + " vertex count");
    long m = 0;
    if (mline.tokens.size() != 1 || !detail::parse_number(mline.tokens[0], m) || m < 3)
      throw ParseError(source, mline.number, label + ": malformed vertex count (need an integer >= 3)");
    std::vector<Point> verts;
    for (long t = 0; t < m; ++t) {
      if (cursor >= lines.size())
        throw ParseError(source, last_line,
                         label + ": expected " + std::to_string(m) + " vertices, found " + std::to_string(t));
      const Line &v = lines[cursor++];
      Point p;
      if (v.tokens.size() != 2 || !detail::parse_number(v.tokens[0], p.x) || !detail::parse_number(v.tokens[1], p.y))
        throw ParseError(source, v.number,
                         label + ": malformed vertex " + std::to_string(t + 1) + " (expected 'x y'; declared " +
                             std::to_string(m) + " vertices)");
      if (!is_finite(p)) throw ParseError(source, v.number, label + ": non-finite coordinate");
      verts.push_back(p);
    }
    if (signed_area(verts) < 0.0) {
      std::reverse(verts.begin(), verts.end());
      result.warnings.push_back(label + " was clockwise; reversed");
    }
    if (auto why = ConvexPolygon::defect(verts)) throw ParseError(source, mline.number, label + ": " + *why);
    parts.push_back(ConvexPolygon::unchecked(std::move(verts)));
  }
  if (cursor < lines.size()) throw ParseError(source, lines[cursor].number, "trailing data after last polygon");
  try {
    result.region = Region(std::move(parts));
  } catch (const GeometryError &e) {
    throw ParseError(source, last_line, e.what());
  }
  return result;
}

/// Loads a region file; warnings go to std::clog.
inline Region load_region(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open region file '" + path.string() + "'");
  auto file = parse_region(in, path.string());
  for (const auto &w : file.warnings) std::clog << "warning: " << path.string() << ": " << w << '\n';
  return std::move(file.region);
}

inline void write_region(std::ostream &out, const Region &region) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf.precision(17);
  buf << region.part_count() << '\n';
  for (const auto &poly : region.parts()) {
    buf << poly.size() << '\n';
    for (Point p : poly.vertices()) buf << p.x << ' ' << p.y << '\n';
  }
  out << buf.str();
}

/// Resolves a preset name or, failing that, a region file path.
inline Region resolve_region(const std::string &name_or_path) {
  for (const auto &n : preset_names())
    if (n == name_or_path) return builtin(n);
  return load_region(name_or_path);
}

} // namespace vtailor
