#pragma once

// Voronoi cells clipped to a polygonal region, with every vertex and edge
// classified by the lines that produced it.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "delaunay.hpp"
#include "geom.hpp"
#include "region.hpp"

namespace vtailor {

/// Meeting point of cells `site`, `first`, `second`; (site, first, second) is CCW.
struct InteriorVertex {
  int site, first, second;
  friend bool operator==(const InteriorVertex &, const InteriorVertex &) = default;
};
/// Bisector of `site` and `other` meeting boundary segment `segment`.
struct BoundaryVertex {
  int site, other, segment;
  Point normal;
  friend bool operator==(const BoundaryVertex &, const BoundaryVertex &) = default;
};
/// Vertex `index` of region part `part`; fixed under site motion.
struct CornerVertex {
  int part, index;
  bool on_boundary;
  friend bool operator==(const CornerVertex &, const CornerVertex &) = default;
};
/// Bisector of `site` and `other` crossing a seam between two parts; `normal`
/// is the unit normal of the seam line.
struct SeamVertex {
  int site, other;
  Point normal;
  friend bool operator==(const SeamVertex &, const SeamVertex &) = default;
};

using VertexClass = std::variant<InteriorVertex, BoundaryVertex, CornerVertex, SeamVertex>;

enum class EdgeKind { interior, boundary, seam };

struct CellEdge {
  Point v, w;
  VertexClass v_class, w_class;
  EdgeKind kind = EdgeKind::interior;
  /// Neighbor site across an interior edge, else -1.
  int neighbor = -1;
  /// Boundary segment id for boundary edges, else -1.
  int segment = -1;

  double length() const { return distance(v, w); }
  Point tangent() const { return (w - v) / length(); }
  /// Outward unit normal (tau_y, -tau_x).
  Point normal() const {
    const Point t = tangent();
    return {t.y, -t.x};
  }
  Point midpoint() const { return (v + w) * 0.5; }
};

/// V_i intersected with one region part. vertices[t] -> vertices[t+1] is edges[t].
struct CellPiece {
  int part = -1;
  std::vector<Point> vertices;
  std::vector<VertexClass> classes;
  std::vector<CellEdge> edges;
  double area = 0.0;
};

struct Cell {
  std::vector<CellPiece> pieces;
  double area = 0.0;
  /// Length of non-seam edges.
  double perimeter = 0.0;
  /// Number of non-seam edges.
  int edge_count = 0;

  bool empty() const { return pieces.empty(); }
};

struct Diagram {
  std::vector<Point> sites;
  Delaunay delaunay;
  std::vector<Cell> cells;
  double region_area = 0.0;
  std::size_t part_count = 0;
  std::vector<Point> region_corners;
  std::vector<BoundarySegment> region_boundary;
  /// Pairs (i, j), i < j, of coincident sites; cell j is left empty.
  std::vector<std::pair<int, int>> duplicate_sites;
  /// All distinct sites are collinear (κ >= 3).
  bool collinear = false;
  /// Cells that failed validation and were re-clipped against every site.
  std::vector<int> fallback_cells;

  std::size_t size() const { return sites.size(); }
  std::size_t piece_count() const {
    std::size_t n = 0;
    for (const auto &c : cells) n += c.pieces.size();
    return n;
  }
};

/// Cap on worker threads: VORONOI_TAILOR_THREADS if set, else hardware concurrency.
inline unsigned worker_threads() {
  if (const char *env = std::getenv("VORONOI_TAILOR_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(k) for k in [0, n) on up to worker_threads() threads, static blocks.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)> &fn, std::size_t min_block = 256) {
  const std::size_t threads = std::min<std::size_t>(worker_threads(), (n + min_block - 1) / std::max<std::size_t>(min_block, 1));
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w * n / threads; k < (w + 1) * n / threads; ++k) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

namespace detail {

// Uniform bucket grid over points for radius queries.
class PointGrid {
public:
  PointGrid(std::span<const Point> pts, std::span<const char> skip = {}) : pts_(pts) {
    BoundingBox box = bounds_of(pts);
    if (box.empty()) box.expand(Point{0, 0});
    lo_ = box.lo;
    const double w = std::max(box.width(), 1e-12), h = std::max(box.height(), 1e-12);
    const double n = static_cast<double>(std::max<std::size_t>(pts.size(), 1));
    cell_ = std::max(std::sqrt(w * h / n), std::max(w, h) / 4096.0);
    nx_ = static_cast<int>(w / cell_) + 1;
    ny_ = static_cast<int>(h / cell_) + 1;
    start_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
    std::vector<int> bucket(pts.size(), -1);
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (!skip.empty() && skip[k]) continue;
      bucket[k] = index(pts[k]);
      ++start_[static_cast<std::size_t>(bucket[k]) + 1];
    }
    for (std::size_t b = 1; b < start_.size(); ++b) start_[b] += start_[b - 1];
    items_.resize(static_cast<std::size_t>(start_.back()));
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (bucket[k] >= 0) items_[static_cast<std::size_t>(fill[static_cast<std::size_t>(bucket[k])]++)] = static_cast<int>(k);
  }

  /// Calls fn(k) for every stored point within distance r of p (and possibly a few farther).
  template <class Fn> void near(Point p, double r, Fn &&fn) const {
    const int x0 = clampx(static_cast<int>(std::floor((p.x - r - lo_.x) / cell_)));
    const int x1 = clampx(static_cast<int>(std::floor((p.x + r - lo_.x) / cell_)));
    const int y0 = clampy(static_cast<int>(std::floor((p.y - r - lo_.y) / cell_)));
    const int y1 = clampy(static_cast<int>(std::floor((p.y + r - lo_.y) / cell_)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const std::size_t b = static_cast<std::size_t>(y) * nx_ + x;
        for (int s = start_[b]; s < start_[b + 1]; ++s) fn(items_[static_cast<std::size_t>(s)]);
      }
  }

private:
  int clampx(int x) const { return std::clamp(x, 0, nx_ - 1); }
  int clampy(int y) const { return std::clamp(y, 0, ny_ - 1); }
  int index(Point p) const {
    const int x = clampx(static_cast<int>((p.x - lo_.x) / cell_));
    const int y = clampy(static_cast<int>((p.y - lo_.y) / cell_));
    return y * nx_ + x;
  }

  std::span<const Point> pts_;
  Point lo_;
  double cell_ = 1.0;
  int nx_ = 1, ny_ = 1;
  std::vector<int> start_;
  std::vector<int> items_;
};

inline double dominance_tol(Point v, Point a) { return eps_geom * std::max(1.0, norm(v) + norm(a)); }

// True if some site other than i is strictly closer to v than a_i.
inline bool dominated(const PointGrid &grid, std::span<const Point> sites, int i, Point v) {
  const Point ai = sites[static_cast<std::size_t>(i)];
  const double d = distance(v, ai);
  const double tol = dominance_tol(v, ai);
  bool hit = false;
  grid.near(v, d, [&](int m) {
    if (hit || m == i) return;
    if (distance(v, sites[static_cast<std::size_t>(m)]) < d - tol) hit = true;
  });
  return hit;
}

inline TaggedPolygon box_polygon(const BoundingBox &b) {
  const double pad = 1e-6 * std::max({b.width(), b.height(), 1.0});
  TaggedPolygon out;
  out.vertices = {{b.lo.x - pad, b.lo.y - pad}, {b.hi.x + pad, b.lo.y - pad}, {b.hi.x + pad, b.hi.y + pad},
                  {b.lo.x - pad, b.hi.y + pad}};
  out.tags.assign(4, EdgeTag{EdgeTag::Source::polygon, -1});
  return out;
}

inline std::optional<TaggedPolygon> clip_all(TaggedPolygon poly, std::span<const Point> sites, int i,
                                             std::span<const int> against) {
  const Point ai = sites[static_cast<std::size_t>(i)];
  for (int k : against) {
    auto next = clip_halfplane(poly, HalfPlane::bisector(ai, sites[static_cast<std::size_t>(k)]), k);
    if (!next) return std::nullopt;
    poly = std::move(*next);
  }
  return poly;
}

inline CellPiece classify_piece(const TaggedPolygon &poly, int part, int i, std::span<const Point> sites,
                                const Region &region) {
  CellPiece piece;
  piece.part = part;
  piece.vertices = poly.vertices;
  piece.area = poly.area();
  const std::size_t n = poly.size();
  const auto &shape = region.parts()[static_cast<std::size_t>(part)];
  const Point ai = sites[static_cast<std::size_t>(i)];

  auto bisector_vs_edge = [&](int k, int edge, Point v) -> VertexClass {
    const int seg = region.boundary_segment_at(part, edge, v);
    if (seg < 0) {
      const Point a = shape[static_cast<std::size_t>(edge)], b = shape[(static_cast<std::size_t>(edge) + 1) % shape.size()];
      return SeamVertex{i, k, Point{b.y - a.y, a.x - b.x} / distance(a, b)};
    }
    return BoundaryVertex{i, k, seg, region.boundary()[static_cast<std::size_t>(seg)].outward_normal};
  };

  piece.classes.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const EdgeTag in = poly.tags[(t + n - 1) % n], out = poly.tags[t];
    const Point v = poly.vertices[t];
    const bool in_cut = in.source == EdgeTag::Source::halfplane;
    const bool out_cut = out.source == EdgeTag::Source::halfplane;
    if (in_cut && out_cut) {
      int first = out.id, second = in.id;
      if (orient(ai, sites[static_cast<std::size_t>(first)], sites[static_cast<std::size_t>(second)]) < 0)
        std::swap(first, second);
      piece.classes.push_back(InteriorVertex{i, first, second});
    } else if (in_cut) {
      piece.classes.push_back(bisector_vs_edge(in.id, out.id, v));
    } else if (out_cut) {
      piece.classes.push_back(bisector_vs_edge(out.id, in.id, v));
    } else {
      const int index = out.id;
      bool on_boundary = false;
      for (Point c : region.corners())
        if (distance(c, shape[static_cast<std::size_t>(index)]) <= eps_geom) on_boundary = true;
      piece.classes.push_back(CornerVertex{part, index, on_boundary});
    }
  }

  piece.edges.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    CellEdge e;
    e.v = poly.vertices[t];
    e.w = poly.vertices[(t + 1) % n];
    e.v_class = piece.classes[t];
    e.w_class = piece.classes[(t + 1) % n];
    const EdgeTag tag = poly.tags[t];
    if (tag.source == EdgeTag::Source::halfplane) {
      e.kind = EdgeKind::interior;
      e.neighbor = tag.id;
    } else {
      e.segment = region.boundary_segment_at(part, tag.id, e.midpoint());
      e.kind = e.segment >= 0 ? EdgeKind::boundary : EdgeKind::seam;
    }
    piece.edges.push_back(e);
  }
  return piece;
}

} // namespace detail

/// Voronoi diagram of `sites` restricted to `region`. Coincident sites are
/// tolerated: the lower index owns the cell and the pair is recorded.
inline Diagram build_diagram(std::span<const Point> sites, const Region &region) {
  Diagram dg;
  dg.sites.assign(sites.begin(), sites.end());
  dg.region_area = region.area();
  dg.part_count = region.part_count();
  dg.region_corners = region.corners();
  dg.region_boundary = region.boundary();
  const std::size_t kappa = sites.size();
  dg.cells.resize(kappa);
  if (kappa == 0) return dg;
  for (Point p : sites)
    if (!is_finite(p)) throw GeometryError("non-finite site coordinate");

  dg.duplicate_sites = find_duplicate_sites(sites);
  std::vector<char> shadowed(kappa, 0);
  for (auto [i, j] : dg.duplicate_sites) shadowed[static_cast<std::size_t>(j)] = 1;
  std::vector<int> alive;
  std::vector<Point> unique;
  for (std::size_t i = 0; i < kappa; ++i)
    if (!shadowed[i]) {
      alive.push_back(static_cast<int>(i));
      unique.push_back(sites[i]);
    }

  const Delaunay tri = build_delaunay(unique, region.bounds());
  dg.delaunay.triangles.reserve(tri.triangles.size());
  for (auto t : tri.triangles)
    dg.delaunay.triangles.push_back({alive[static_cast<std::size_t>(t[0])], alive[static_cast<std::size_t>(t[1])],
                                     alive[static_cast<std::size_t>(t[2])]});
  dg.delaunay.neighbors.assign(kappa, {});
  for (std::size_t u = 0; u < alive.size(); ++u)
    for (int nb : tri.neighbors[u])
      dg.delaunay.neighbors[static_cast<std::size_t>(alive[u])].push_back(alive[static_cast<std::size_t>(nb)]);
  dg.collinear = unique.size() >= 3 && tri.triangles.empty();

  const detail::PointGrid grid(sites, shadowed);
  const auto &parts = region.parts();
  std::vector<char> fell_back(kappa, 0);

  parallel_for(kappa, [&](std::size_t ci) {
    if (shadowed[ci]) return;
    const int i = static_cast<int>(ci);
    auto build = [&](std::span<const int> against) {
      std::vector<CellPiece> pieces;
      std::optional<BoundingBox> reach;
      if (parts.size() > 1) {
        auto hull = detail::clip_all(detail::box_polygon(region.bounds()), sites, i, against);
        if (!hull) return pieces;
        reach = bounds_of(hull->vertices);
      }
      for (std::size_t j = 0; j < parts.size(); ++j) {
        if (reach && !parts[j].bounds().overlaps(*reach, eps_geom)) continue;
        auto clipped = detail::clip_all(TaggedPolygon::from(parts[j]), sites, i, against);
        if (clipped) pieces.push_back(detail::classify_piece(*clipped, static_cast<int>(j), i, sites, region));
      }
      return pieces;
    };

    auto pieces = build(dg.delaunay.neighbors[ci]);
    bool valid = true;
    for (const auto &pc : pieces)
      for (Point v : pc.vertices)
        if (valid && detail::dominated(grid, sites, i, v)) valid = false;
    if (!valid) {
      std::vector<int> everyone;
      for (std::size_t k = 0; k < kappa; ++k)
        if (k != ci && !shadowed[k]) everyone.push_back(static_cast<int>(k));
      pieces = build(everyone);
      fell_back[ci] = 1;
    }

    Cell &cell = dg.cells[ci];
    cell.pieces = std::move(pieces);
    for (const auto &pc : cell.pieces) {
      cell.area += pc.area;
      for (const auto &e : pc.edges) {
        if (e.kind == EdgeKind::seam) continue;
        cell.perimeter += e.length();
        ++cell.edge_count;
      }
    }
  });
  for (std::size_t i = 0; i < kappa; ++i)
    if (fell_back[i]) dg.fallback_cells.push_back(static_cast<int>(i));
  return dg;
}

/// Sites as points from a flat coordinate vector (x1, y1, x2, y2, ...).
inline std::vector<Point> unflatten(std::span<const double> a) {
  std::vector<Point> pts(a.size() / 2);
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {a[2 * i], a[2 * i + 1]};
  return pts;
}

inline std::vector<double> flatten(std::span<const Point> pts) {
  std::vector<double> a(2 * pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    a[2 * i] = pts[i].x;
    a[2 * i + 1] = pts[i].y;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Regularity

struct Violation {
  enum class Kind {
    duplicate_sites,
    collinear_sites,
    vertex_degree_4,
    boundary_vertex_degree_3,
    vertex_near_corner,
    vertex_near_boundary,
    short_interior_edge,
    bisector_parallel_to_boundary,
  };
  Kind kind;
  Point where;
  std::vector<int> sites;
};

inline const char *to_string(Violation::Kind k) {
  switch (k) {
  case Violation::Kind::duplicate_sites: return "duplicate sites";
  case Violation::Kind::collinear_sites: return "collinear sites";
  case Violation::Kind::vertex_degree_4: return "vertex degree 4";
  case Violation::Kind::boundary_vertex_degree_3: return "boundary vertex degree 3";
  case Violation::Kind::vertex_near_corner: return "vertex near region corner";
  case Violation::Kind::vertex_near_boundary: return "interior vertex near boundary";
  case Violation::Kind::short_interior_edge: return "short interior edge";
  case Violation::Kind::bisector_parallel_to_boundary: return "bisector parallel to boundary";
  }
  return "?";
}

struct RegularityReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind k) const {
    return std::any_of(violations.begin(), violations.end(), [k](const Violation &v) { return v.kind == k; });
  }
};

/// Checks the conditions under which vertex sensitivities exist, with
/// absolute tolerance `margin` on coordinates.
inline RegularityReport verify_regularity(const Diagram &dg, double margin = eps_reg) {
  RegularityReport rep;
  auto flag = [&](Violation::Kind k, Point p, std::vector<int> s) { rep.violations.push_back({k, p, std::move(s)}); };

  for (auto [i, j] : dg.duplicate_sites) flag(Violation::Kind::duplicate_sites, dg.sites[static_cast<std::size_t>(i)], {i, j});
  if (dg.collinear) flag(Violation::Kind::collinear_sites, dg.sites.front(), {});

  std::vector<char> skip(dg.sites.size(), 0);
  for (auto [i, j] : dg.duplicate_sites) skip[static_cast<std::size_t>(j)] = 1;
  const detail::PointGrid grid(dg.sites, skip);
  auto extra_sites = [&](Point v, std::initializer_list<int> owners) {
    const double d = distance(v, dg.sites[static_cast<std::size_t>(*owners.begin())]);
    std::vector<int> out;
    grid.near(v, d + margin, [&](int m) {
      if (std::find(owners.begin(), owners.end(), m) != owners.end()) return;
      if (std::abs(distance(v, dg.sites[static_cast<std::size_t>(m)]) - d) < margin) out.push_back(m);
    });
    return out;
  };
  auto near_corner = [&](Point v) {
    return std::any_of(dg.region_corners.begin(), dg.region_corners.end(),
                       [&](Point c) { return distance(c, v) < margin; });
  };
  auto near_boundary = [&](Point v) {
    for (const auto &s : dg.region_boundary) {
      const Point d = s.to - s.from;
      const double t = std::clamp(dot(v - s.from, d) / norm2(d), 0.0, 1.0);
      if (distance(v, s.from + d * t) < margin) return true;
    }
    return false;
  };

  for (std::size_t ci = 0; ci < dg.cells.size(); ++ci) {
    const int i = static_cast<int>(ci);
    for (const auto &pc : dg.cells[ci].pieces) {
      for (std::size_t t = 0; t < pc.vertices.size(); ++t) {
        const Point v = pc.vertices[t];
        const auto &cls = pc.classes[t];
        if (const auto *iv = std::get_if<InteriorVertex>(&cls)) {
          // Report each interior vertex once, from its lowest-index cell.
          if (i > std::min(iv->first, iv->second)) continue;
          if (auto more = extra_sites(v, {i, iv->first, iv->second}); !more.empty()) {
            more.insert(more.begin(), {i, iv->first, iv->second});
            flag(Violation::Kind::vertex_degree_4, v, more);
          }
          if (near_corner(v))
            flag(Violation::Kind::vertex_near_corner, v, {i, iv->first, iv->second});
          else if (near_boundary(v))
            flag(Violation::Kind::vertex_near_boundary, v, {i, iv->first, iv->second});
        } else if (const auto *bv = std::get_if<BoundaryVertex>(&cls)) {
          if (i > bv->other) continue;
          if (auto more = extra_sites(v, {i, bv->other}); !more.empty()) {
            more.insert(more.begin(), {i, bv->other});
            flag(Violation::Kind::boundary_vertex_degree_3, v, more);
          }
          if (near_corner(v)) flag(Violation::Kind::vertex_near_corner, v, {i, bv->other});
          const Point ai = dg.sites[ci], ak = dg.sites[static_cast<std::size_t>(bv->other)];
          if (std::abs(cross(ak - ai, bv->normal)) < margin * norm(ak - ai))
            flag(Violation::Kind::bisector_parallel_to_boundary, v, {i, bv->other});
        }
      }
      for (const auto &e : pc.edges)
        if (e.kind == EdgeKind::interior && i < e.neighbor && e.length() < margin)
          flag(Violation::Kind::short_interior_edge, e.midpoint(), {i, e.neighbor});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Per-cell statistics

struct EdgeStat {
  CellEdge edge;
  /// Voronoi edge midpoint p_E.
  Point p;
  /// Delaunay edge midpoint q_E; equals p for non-interior edges.
  Point q;
};

struct CellStats {
  double area = 0.0;
  double perimeter = 0.0;
  int n = 0;
  std::vector<EdgeStat> edges;
};

/// Aggregates of cell i over its non-seam edges.
inline CellStats cell_stats(const Diagram &dg, std::size_t i) {
  const Cell &cell = dg.cells.at(i);
  CellStats s;
  s.area = cell.area;
  s.perimeter = cell.perimeter;
  s.n = cell.edge_count;
  for (const auto &pc : cell.pieces)
    for (const auto &e : pc.edges) {
      if (e.kind == EdgeKind::seam) continue;
      const Point p = e.midpoint();
      const Point q = e.kind == EdgeKind::interior ? (dg.sites[i] + dg.sites[static_cast<std::size_t>(e.neighbor)]) * 0.5 : p;
      s.edges.push_back({e, p, q});
    }
  return s;
}

// ---------------------------------------------------------------------------
// Text dump

namespace detail {

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string class_tag(const VertexClass &c) {
  return std::visit(
      [](const auto &v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, InteriorVertex>)
          return "interior " + std::to_string(v.site) + " " + std::to_string(v.first) + " " + std::to_string(v.second);
        else if constexpr (std::is_same_v<T, BoundaryVertex>)
          return "boundary " + std::to_string(v.site) + " " + std::to_string(v.other) + " seg " + std::to_string(v.segment);
        else if constexpr (std::is_same_v<T, CornerVertex>)
          return "corner " + std::to_string(v.part) + " " + std::to_string(v.index) + (v.on_boundary ? " outer" : " inner");
        else
          return "seam " + std::to_string(v.site) + " " + std::to_string(v.other);
      },
      c);
}

} // namespace detail

/// Line-oriented dump: per cell, each piece's CCW vertices with class tags
/// followed by its edges with kind tags.
inline void write_dump(std::ostream &out, const Diagram &dg) {
  using detail::fmt17;
  out << "diagram sites " << dg.sites.size() << " pieces " << dg.piece_count() << " area " << fmt17(dg.region_area)
      << "\n";
  for (std::size_t i = 0; i < dg.sites.size(); ++i)
    out << "site " << i << " " << fmt17(dg.sites[i].x) << " " << fmt17(dg.sites[i].y) << "\n";
  for (std::size_t i = 0; i < dg.cells.size(); ++i) {
    const Cell &c = dg.cells[i];
    out << "cell " << i << " area " << fmt17(c.area) << " perimeter " << fmt17(c.perimeter) << " edges "
        << c.edge_count << " pieces " << c.pieces.size() << "\n";
    for (const auto &pc : c.pieces) {
      out << " piece part " << pc.part << " vertices " << pc.vertices.size() << "\n";
      for (std::size_t t = 0; t < pc.vertices.size(); ++t)
        out << "  v " << fmt17(pc.vertices[t].x) << " " << fmt17(pc.vertices[t].y) << " "
            << detail::class_tag(pc.classes[t]) << "\n";
      for (const auto &e : pc.edges) {
        out << "  e ";
        switch (e.kind) {
        case EdgeKind::interior: out << "interior " << e.neighbor; break;
        case EdgeKind::boundary: out << "boundary " << e.segment; break;
        case EdgeKind::seam: out << "seam"; break;
        }
        out << "\n";
      }
    }
  }
}

} // namespace vtailor
