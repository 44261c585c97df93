#pragma once

// Spectral projected gradient with Barzilai-Borwein steps and a nonmonotone
// (max over recent values) Armijo line search.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "geom.hpp"

namespace vtailor {

struct SpgOptions {
  int max_iter = 50000;
  double tol_f = 1e-8;
  double tol_g = 1e-8;
  int memory = 10;
  double gamma = 1e-4;
  double lambda_min = 1e-10, lambda_max = 1e10;
  double sigma1 = 0.1, sigma2 = 0.9;
  int stall_window = 500;
  double stall_rel = 1e-12;
  /// Backtracks per iteration before the run is declared stalled.
  int max_backtracks = 60;

  void validate() const {
    if (!(gamma > 0 && gamma < 1)) throw Error("spg: gamma must lie in (0, 1)");
    if (!(sigma1 > 0 && sigma1 < sigma2 && sigma2 < 1)) throw Error("spg: need 0 < sigma1 < sigma2 < 1");
    if (!(lambda_min > 0 && lambda_min < lambda_max)) throw Error("spg: need 0 < lambda_min < lambda_max");
    if (memory < 1) throw Error("spg: memory must be at least 1");
    if (max_iter < 0) throw Error("spg: max_iter must be non-negative");
    if (stall_window < 1) throw Error("spg: stall window must be at least 1");
  }
};

enum class StopReason { target_f, small_gradient, stalled, max_iter };

inline const char *to_string(StopReason r) {
  switch (r) {
  case StopReason::target_f: return "target_f";
  case StopReason::small_gradient: return "small_gradient";
  case StopReason::stalled: return "stalled";
  case StopReason::max_iter: return "max_iter";
  }
  return "?";
}

inline bool converged(StopReason r) { return r == StopReason::target_f || r == StopReason::small_gradient; }

struct SpgReport {
  std::vector<double> x;
  double f = 0.0;
  double gnorm = 0.0;
  int it = 0;
  int fcnt = 0;
  /// Gradients at accepted iterates, it + 1.
  int gcnt = 0;
  StopReason reason = StopReason::max_iter;
  /// Number of trial points where the objective was not finite.
  int nonfinite = 0;
  double seconds = 0.0;
};

/// Value at x; writes the gradient into g. Non-finite values make the line
/// search backtrack.
using ValueAndGradient = std::function<double(std::span<const double> x, std::span<double> g)>;
/// In-place projection onto the feasible set.
using Projection = std::function<void(std::span<double> x)>;

inline double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double t : v) m = std::max(m, std::abs(t));
  return m;
}

namespace detail {

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double t) { return std::isfinite(t); });
}

} // namespace detail

inline SpgReport minimize(const ValueAndGradient &fg, std::vector<double> x0, const SpgOptions &opts = {},
                          const Projection &project = {}) {
  opts.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = x0.size();
  SpgReport rep;
  std::vector<double> x = std::move(x0), g(n), xt(n), gt(n), d(n), pg(n);
  if (project) project(x);

  double f = fg(x, g);
  rep.fcnt = 1;
  if (!std::isfinite(f) || !detail::all_finite(g)) throw Error("spg: objective is not finite at the initial point");

  // Projected gradient P(x - g) - x; with no projection this is -g.
  auto projected_gradient_norm = [&]() {
    if (!project) return sup_norm(g);
    for (std::size_t k = 0; k < n; ++k) pg[k] = x[k] - g[k];
    project(pg);
    double m = 0.0;
    for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::abs(pg[k] - x[k]));
    return m;
  };

  double gnorm = projected_gradient_norm();
  double lambda = gnorm > 0 ? std::clamp(1.0 / gnorm, opts.lambda_min, opts.lambda_max) : opts.lambda_max;
  std::deque<double> recent{f};
  double best = f;
  int best_at = 0;

  auto finish = [&](StopReason why) {
    rep.x = x;
    rep.f = f;
    rep.gnorm = gnorm;
    rep.gcnt = rep.it + 1;
    rep.reason = why;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  };

  for (;;) {
    if (f <= opts.tol_f) return finish(StopReason::target_f);
    if (gnorm <= opts.tol_g) return finish(StopReason::small_gradient);
    if (rep.it >= opts.max_iter) return finish(StopReason::max_iter);
    if (rep.it - best_at >= opts.stall_window) return finish(StopReason::stalled);

    for (std::size_t k = 0; k < n; ++k) d[k] = x[k] - lambda * g[k];
    if (project) project(d);
    double gd = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      d[k] -= x[k];
      gd += g[k] * d[k];
    }
    const double fmax = *std::max_element(recent.begin(), recent.end());

    double alpha = 1.0, ft = 0.0;
    bool accepted = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      for (std::size_t k = 0; k < n; ++k) xt[k] = x[k] + alpha * d[k];
      ft = fg(xt, gt);
      ++rep.fcnt;
      if (!std::isfinite(ft) || !detail::all_finite(gt)) {
        ++rep.nonfinite;
        alpha *= 0.5;
        continue;
      }
      if (ft <= fmax + opts.gamma * alpha * gd) {
        accepted = true;
        break;
      }
      const double denom = ft - f - alpha * gd;
      double next = denom > 0 ? -0.5 * alpha * alpha * gd / denom : 0.5 * alpha;
      next = std::clamp(next, opts.sigma1 * alpha, opts.sigma2 * alpha);
      alpha = next;
    }
    if (!accepted) return finish(StopReason::stalled);

    double ss = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = xt[k] - x[k], y = gt[k] - g[k];
      ss += s * s;
      sy += s * y;
    }
    lambda = sy > 0 ? std::clamp(ss / sy, opts.lambda_min, opts.lambda_max) : opts.lambda_max;
    x.swap(xt);
    g.swap(gt);
    f = ft;
    ++rep.it;
    gnorm = projected_gradient_norm();
    recent.push_back(f);
    if (recent.size() > static_cast<std::size_t>(opts.memory)) recent.pop_front();
    if (f < best - opts.stall_rel * std::abs(best)) {
      best = f;
      best_at = rep.it;
    }
  }
}

// ---------------------------------------------------------------------------
// Random streams

/// SplitMix64 step; also used to derive independent per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of trial `t` in the stream rooted at `seed`.
inline std::uint64_t trial_seed(std::uint64_t seed, int t) {
  std::uint64_t s = seed;
  std::uint64_t out = 0;
  for (int k = 0; k <= t; ++k) out = splitmix64(s);
  return out;
}

/// mt19937_64 with a portable [0, 1) mapping, so draws are identical across
/// standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::mt19937_64 engine_;
};

struct MultiTrialReport {
  SpgReport best;
  int best_trial = 0;
  /// Trials run before stopping.
  int ntrials = 0;
  std::vector<SpgReport> trials;
};

/// Runs up to n_trials minimizations from start(trial_seed(seed, t)); stops at
/// the first trial with f <= tol_f, else returns the lowest-f trial.
inline MultiTrialReport multi_trial(const ValueAndGradient &fg,
                                    const std::function<std::vector<double>(std::uint64_t)> &start, int n_trials,
                                    std::uint64_t seed, const SpgOptions &opts = {}, const Projection &project = {}) {
  if (n_trials < 1) throw Error("multi_trial: need at least one trial");
  MultiTrialReport out;
  for (int t = 0; t < n_trials; ++t) {
    SpgReport r = minimize(fg, start(trial_seed(seed, t)), opts, project);
    ++out.ntrials;
    const bool hit = r.f <= opts.tol_f;
    if (t == 0 || r.f < out.best.f) {
      out.best = r;
      out.best_trial = t;
    }
    out.trials.push_back(std::move(r));
    if (hit) {
      out.best = out.trials.back();
      out.best_trial = t;
      break;
    }
  }
  return out;
}

} // namespace vtailor
