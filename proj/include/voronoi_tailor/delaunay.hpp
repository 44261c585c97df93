#pragma once

// Incremental Bowyer-Watson Delaunay triangulation.
//
// Sites are inserted in Hilbert-curve order into a super-triangle placed far
// outside the sites and an optional extent (the clipping region). Predicates
// are evaluated in long double. Output is deterministic for given inputs.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geom.hpp"

namespace vtailor {

struct Delaunay {
  /// Counterclockwise site-index triples, each rotated so the smallest index comes first.
  std::vector<std::array<int, 3>> triangles;
  /// Sorted Delaunay neighbors of each site.
  std::vector<std::vector<int>> neighbors;
};

namespace detail {

inline long double orient_ld(Point a, Point b, Point c) {
  const long double abx = static_cast<long double>(b.x) - a.x, aby = static_cast<long double>(b.y) - a.y;
  const long double acx = static_cast<long double>(c.x) - a.x, acy = static_cast<long double>(c.y) - a.y;
  return abx * acy - aby * acx;
}

// Positive when d lies strictly inside the circumcircle of CCW triangle abc.
inline long double incircle_ld(Point a, Point b, Point c, Point d) {
  const long double adx = static_cast<long double>(a.x) - d.x, ady = static_cast<long double>(a.y) - d.y;
  const long double bdx = static_cast<long double>(b.x) - d.x, bdy = static_cast<long double>(b.y) - d.y;
  const long double cdx = static_cast<long double>(c.x) - d.x, cdy = static_cast<long double>(c.y) - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  return ad * (bdx * cdy - cdx * bdy) + bd * (cdx * ady - adx * cdy) + cd * (adx * bdy - bdx * ady);
}

inline std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, int order) {
  std::uint64_t d = 0;
  for (std::uint32_t s = 1u << (order - 1); s > 0; s >>= 1) {
    const std::uint32_t rx = (x & s) ? 1u : 0u;
    const std::uint32_t ry = (y & s) ? 1u : 0u;
    d += static_cast<std::uint64_t>(s) * s * ((3u * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - (x & (s - 1)) + (x & ~(s - 1));
        y = s - 1 - (y & (s - 1)) + (y & ~(s - 1));
        x &= (s << 1) - 1;
        y &= (s << 1) - 1;
      }
      std::swap(x, y);
    }
  }
  return d;
}

inline std::vector<int> hilbert_order(std::span<const Point> pts) {
  const BoundingBox box = bounds_of(pts);
  const double span = std::max({box.width(), box.height(), 1e-300});
  constexpr int order = 16;
  constexpr double cells = static_cast<double>((1u << order) - 1);
  std::vector<std::pair<std::uint64_t, int>> keyed(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto qx = static_cast<std::uint32_t>((pts[i].x - box.lo.x) / span * cells);
    const auto qy = static_cast<std::uint32_t>((pts[i].y - box.lo.y) / span * cells);
    keyed[i] = {hilbert_index(qx, qy, order), static_cast<int>(i)};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<int> out(pts.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) out[i] = keyed[i].second;
  return out;
}

class BowyerWatson {
public:
  BowyerWatson(std::span<const Point> sites, const BoundingBox &extent) : n_(static_cast<int>(sites.size())) {
    pts_.assign(sites.begin(), sites.end());
    BoundingBox box = bounds_of(sites);
    box.expand(extent);
    const Point c = box.center();
    const double size = std::max({box.width(), box.height(), 1.0});
    const double r = 1e4 * size;
    pts_.push_back({c.x, c.y + 2.0 * r});
    pts_.push_back({c.x - 1.7320508075688772 * r, c.y - r});
    pts_.push_back({c.x + 1.7320508075688772 * r, c.y - r});
    tris_.push_back({{n_, n_ + 1, n_ + 2}, {-1, -1, -1}, true});
  }

  void insert_all() {
    const auto order = hilbert_order(std::span<const Point>(pts_.data(), static_cast<std::size_t>(n_)));
    int hint = 0;
    for (int idx : order) hint = insert(idx, hint);
  }

  Delaunay result() const {
    Delaunay out;
    out.neighbors.assign(static_cast<std::size_t>(n_), {});
    for (const auto &t : tris_) {
      if (!t.alive) continue;
      for (int e = 0; e < 3; ++e) {
        const int a = t.v[e], b = t.v[(e + 1) % 3];
        if (a < n_ && b < n_) {
          out.neighbors[static_cast<std::size_t>(a)].push_back(b);
          out.neighbors[static_cast<std::size_t>(b)].push_back(a);
        }
      }
      if (t.v[0] < n_ && t.v[1] < n_ && t.v[2] < n_ &&
          orient_ld(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]]) > 0) {
        std::array<int, 3> tri{t.v[0], t.v[1], t.v[2]};
        std::rotate(tri.begin(), std::min_element(tri.begin(), tri.end()), tri.end());
        out.triangles.push_back(tri);
      }
    }
    for (auto &nb : out.neighbors) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
    std::sort(out.triangles.begin(), out.triangles.end());
    return out;
  }

private:
  struct Tri {
    std::array<int, 3> v;
    // n[e] is the triangle across edge v[e] -> v[e+1].
    std::array<int, 3> n;
    bool alive;
  };

  bool inside(const Tri &t, Point p) const {
    for (int e = 0; e < 3; ++e)
      if (orient_ld(pts_[t.v[e]], pts_[t.v[(e + 1) % 3]], p) < 0) return false;
    return true;
  }

  int locate(Point p, int start) const {
    int t = start;
    if (t < 0 || !tris_[static_cast<std::size_t>(t)].alive) t = first_alive();
    const std::size_t limit = 4 * tris_.size() + 64;
    for (std::size_t step = 0; step < limit; ++step) {
      const Tri &tri = tris_[static_cast<std::size_t>(t)];
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int e = static_cast<int>((k + step) % 3);
        if (orient_ld(pts_[tri.v[e]], pts_[tri.v[(e + 1) % 3]], p) < 0 && tri.n[e] >= 0) {
          t = tri.n[e];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    // The walk cycled (possible only through rounding); scan instead.
    for (std::size_t k = 0; k < tris_.size(); ++k)
      if (tris_[k].alive && inside(tris_[k], p)) return static_cast<int>(k);
    throw GeometryError("Delaunay point location failed");
  }

  int first_alive() const {
    for (std::size_t k = 0; k < tris_.size(); ++k)
      if (tris_[k].alive) return static_cast<int>(k);
    return -1;
  }

  bool conflicts(const Tri &t, Point p) const {
    return incircle_ld(pts_[t.v[0]], pts_[t.v[1]], pts_[t.v[2]], p) > 0;
  }

  int insert(int idx, int hint) {
    const Point p = pts_[static_cast<std::size_t>(idx)];
    const int seed = locate(p, hint);

    ++stamp_;
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
    cavity_.clear();
    cavity_.push_back(seed);
    mark_[static_cast<std::size_t>(seed)] = stamp_;
    for (std::size_t q = 0; q < cavity_.size(); ++q) {
      const Tri &t = tris_[static_cast<std::size_t>(cavity_[q])];
      for (int e = 0; e < 3; ++e) {
        const int nb = t.n[e];
        if (nb < 0 || mark_[static_cast<std::size_t>(nb)] == stamp_) continue;
        if (conflicts(tris_[static_cast<std::size_t>(nb)], p)) {
          mark_[static_cast<std::size_t>(nb)] = stamp_;
          cavity_.push_back(nb);
        }
      }
    }

    // Grow the cavity until every boundary edge is visible from p, so the
    // re-triangulated star is valid even when rounding misjudged a conflict.
    for (bool grown = true; grown;) {
      grown = false;
      for (std::size_t q = 0; q < cavity_.size() && !grown; ++q) {
        const Tri &t = tris_[static_cast<std::size_t>(cavity_[q])];
        for (int e = 0; e < 3; ++e) {
          const int nb = t.n[e];
          if (nb >= 0 && mark_[static_cast<std::size_t>(nb)] == stamp_) continue;
          if (orient_ld(pts_[t.v[e]], pts_[t.v[(e + 1) % 3]], p) <= 0) {
            if (nb < 0) throw GeometryError("site outside the super-triangle");
            mark_[static_cast<std::size_t>(nb)] = stamp_;
            cavity_.push_back(nb);
            grown = true;
            break;
          }
        }
      }
    }

    rim_.clear();
    for (int c : cavity_) {
      const Tri &t = tris_[static_cast<std::size_t>(c)];
      for (int e = 0; e < 3; ++e) {
        const int nb = t.n[e];
        if (nb >= 0 && mark_[static_cast<std::size_t>(nb)] == stamp_) continue;
        rim_.push_back({t.v[e], t.v[(e + 1) % 3], nb});
      }
    }
    for (int c : cavity_) {
      tris_[static_cast<std::size_t>(c)].alive = false;
      free_.push_back(c);
    }

    created_.clear();
    for (const auto &r : rim_) {
      int slot;
      if (!free_.empty()) {
        slot = free_.back();
        free_.pop_back();
        tris_[static_cast<std::size_t>(slot)] = {{r.a, r.b, idx}, {r.outside, -1, -1}, true};
      } else {
        slot = static_cast<int>(tris_.size());
        tris_.push_back({{r.a, r.b, idx}, {r.outside, -1, -1}, true});
        mark_.push_back(0);
      }
      if (r.outside >= 0) {
        Tri &o = tris_[static_cast<std::size_t>(r.outside)];
        for (int e = 0; e < 3; ++e)
          if (o.v[e] == r.b && o.v[(e + 1) % 3] == r.a) o.n[e] = slot;
      }
      created_.push_back(slot);
    }
    // Tri (a, b, p): edge b->p meets the new triangle starting at b,
    // edge p->a meets the new triangle ending at a.
    for (int s : created_) {
      Tri &t = tris_[static_cast<std::size_t>(s)];
      int after = -1, before = -1;
      for (int o : created_) {
        const Tri &u = tris_[static_cast<std::size_t>(o)];
        if (u.v[0] == t.v[1]) after = o;
        if (u.v[1] == t.v[0]) before = o;
      }
      if (after < 0 || before < 0) throw GeometryError("Delaunay cavity is not a simple polygon");
      t.n[1] = after;
      t.n[2] = before;
    }
    return created_.front();
  }

  int n_;
  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<int> cavity_;
  std::vector<int> created_;
  struct RimEdge {
    int a, b, outside;
  };
  std::vector<RimEdge> rim_;
};

} // namespace detail

/// Index pair (i, j), i < j, for every pair of sites closer than `tol`.
inline std::vector<std::pair<int, int>> find_duplicate_sites(std::span<const Point> sites, double tol = eps_geom) {
  std::vector<int> idx(sites.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    const Point pa = sites[static_cast<std::size_t>(a)], pb = sites[static_cast<std::size_t>(b)];
    return pa.x != pb.x ? pa.x < pb.x : (pa.y != pb.y ? pa.y < pb.y : a < b);
  });
  std::vector<std::pair<int, int>> dups;
  for (std::size_t s = 0; s < idx.size(); ++s) {
    const Point p = sites[static_cast<std::size_t>(idx[s])];
    for (std::size_t t = s + 1; t < idx.size(); ++t) {
      const Point q = sites[static_cast<std::size_t>(idx[t])];
      if (q.x - p.x > tol) break;
      if (distance(p, q) <= tol) dups.emplace_back(std::min(idx[s], idx[t]), std::max(idx[s], idx[t]));
    }
  }
  std::sort(dups.begin(), dups.end());
  return dups;
}

/// Delaunay triangulation of pairwise-distinct sites. The super-triangle is
/// placed relative to the bounding box of the sites and `extent`, which keeps
/// every Delaunay edge whose dual Voronoi edge meets `extent`.
/// Throws GeometryError on duplicate or non-finite sites.
inline Delaunay build_delaunay(std::span<const Point> sites, const BoundingBox &extent = {}) {
  for (Point p : sites)
    if (!is_finite(p)) throw GeometryError("non-finite site coordinate");
  if (auto dups = find_duplicate_sites(sites); !dups.empty())
    throw GeometryError("duplicate sites " + std::to_string(dups.front().first) + " and " +
                        std::to_string(dups.front().second));
  Delaunay out;
  const std::size_t n = sites.size();
  if (n <= 2) {
    out.neighbors.assign(n, {});
    if (n == 2) {
      out.neighbors[0] = {1};
      out.neighbors[1] = {0};
    }
    return out;
  }
  detail::BowyerWatson bw(sites, extent);
  bw.insert_all();
  return bw.result();
}

} // namespace vtailor
