#pragma once

// Independent reference computations used by the tests. None of these reuse
// the library's closed forms.

#include "choquet/capacity.hpp"
#include "choquet/integral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using namespace choquet;

/// Level set {f > t} rebuilt by scanning pieces.
inline Region strictly_above(const StepFunction& f, double t) {
  Region out = Region::empty(f.universe());
  for (const auto& p : f.pieces()) {
    if (p.value > t) out = out | p.region;
  }
  if (0.0 > t) out = out | complement([&] {
    Region all = Region::empty(f.universe());
    for (const auto& p : f.pieces()) all = all | p.region;
    return all;
  }());
  return out;
}

/// Midpoint Riemann sum of t |-> mu(f > t) over [0, max f].
inline double layer_cake(const Capacity& mu, const StepFunction& f, int steps = 10000) {
  double top = 0.0;
  for (const auto& p : f.pieces()) top = std::max(top, p.value);
  if (top <= 0.0) return 0.0;
  const double dt = top / steps;
  // mu(f > t) only changes at piece values; cache by level set.
  double total = 0.0;
  for (int k = 0; k < steps; ++k) total += mu(strictly_above(f, (k + 0.5) * dt)) * dt;
  return total;
}

/// Fraction of jittered-grid sample points (one per cell of a k x k grid) in b.
inline double monte_carlo_area(const RectUnion& b, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  long hits = 0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      double x = (i + u(rng)) / k;
      double y = (j + u(rng)) / k;
      if (b.contains(rational_from_double(x), rational_from_double(y))) ++hits;
    }
  }
  return static_cast<double>(hits) / (static_cast<double>(k) * k);
}

/// Membership of (x, y) decided from the rectangle list, not the slab form.
inline bool in_rect_list(const std::vector<Rect>& rects, const Rational& x, const Rational& y) {
  return std::any_of(rects.begin(), rects.end(), [&](const Rect& r) {
    return r.x0 <= x && x < r.x1 && r.y0 <= y && y < r.y1;
  });
}

/// Maximizes u over the budget line p.x = p.e in two commodities by a fine scan.
inline double budget_max_scan(const std::function<double(const Vector&)>& u, const Vector& p, const Vector& e,
                              int steps = 200000) {
  const double wealth = dot(p, e);
  double best = 0.0;
  for (int k = 0; k <= steps; ++k) {
    double x0 = wealth / p[0] * k / steps;
    double x1 = (wealth - p[0] * x0) / p[1];
    best = std::max(best, u({x0, std::max(0.0, x1)}));
  }
  return best;
}

/// Grid search for z = sum_i t_i (v_i - e_i) + r with v_i a convex combination of
/// at most three generators, t_i in [0, m_i], r >= 0. Resolution 1/steps.
struct Term {
  double mass;
  Vector base;
  std::vector<Vector> gens;
};

inline bool grid_cone_member(const std::vector<Term>& terms, const Vector& z, int steps, double tol) {
  const std::size_t n = z.size();
  // Enumerate (t_i, barycentric weights) per term, then check orthant slack.
  std::vector<std::vector<Vector>> options(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& g = terms[i].gens;
    for (int a = 0; a <= steps; ++a) {
      double t = terms[i].mass * a / steps;
      auto push = [&](const std::vector<double>& w) {
        Vector v(n, 0.0);
        for (std::size_t k = 0; k < g.size(); ++k) {
          for (std::size_t j = 0; j < n; ++j) v[j] += w[k] * g[k][j];
        }
        Vector out(n);
        for (std::size_t j = 0; j < n; ++j) out[j] = t * (v[j] - terms[i].base[j]);
        options[i].push_back(out);
      };
      if (a == 0) {
        options[i].push_back(Vector(n, 0.0));
        continue;
      }
      if (g.size() == 1) push({1.0});
      if (g.size() == 2) {
        for (int b = 0; b <= steps; ++b) push({1.0 * b / steps, 1.0 - 1.0 * b / steps});
      }
      if (g.size() == 3) {
        for (int b = 0; b <= steps; ++b) {
          for (int c = 0; b + c <= steps; ++c) push({1.0 * b / steps, 1.0 * c / steps, 1.0 * (steps - b - c) / steps});
        }
      }
    }
  }
  std::function<bool(std::size_t, Vector, bool)> rec = [&](std::size_t i, Vector acc, bool active) {
    if (i == terms.size()) {
      bool zero = true;
      for (std::size_t j = 0; j < n; ++j) {
        double r = z[j] - acc[j];
        if (r < -tol) return false;
        if (std::abs(r) > tol) zero = false;
      }
      return zero || active;
    }
    for (std::size_t o = 0; o < options[i].size(); ++o) {
      Vector next = acc;
      for (std::size_t j = 0; j < n; ++j) next[j] += options[i][o][j];
      if (rec(i + 1, next, active || o > 0)) return true;
    }
    return false;
  };
  return rec(0, Vector(n, 0.0), false);
}

}  // namespace oracle
