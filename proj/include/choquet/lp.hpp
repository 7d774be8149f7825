#pragma once

// Dense two-phase simplex for small linear programs. Instantiated with Rational
// for exact answers and with double (tolerance based) for larger systems.

#include "choquet/error.hpp"
#include "choquet/rational.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace choquet::lp {

enum class Sense { le, ge, eq };
enum class Outcome { optimal, infeasible, unbounded };

template <class T>
struct Row {
  std::vector<T> coef;
  Sense sense = Sense::le;
  T rhs{};
};

/// maximize objective . x subject to rows; x_j >= 0 unless free[j].
template <class T>
struct Program {
  explicit Program(std::size_t n) : objective(n, T(0)), free(n, false) {}

  std::size_t vars() const { return objective.size(); }
  void add(std::vector<T> coef, Sense sense, T rhs) { rows.push_back({std::move(coef), sense, std::move(rhs)}); }

  std::vector<T> objective;
  std::vector<bool> free;
  std::vector<Row<T>> rows;
};

template <class T>
struct Solution {
  Outcome outcome = Outcome::infeasible;
  T value{};
  std::vector<T> x;
  bool optimal() const { return outcome == Outcome::optimal; }
};

template <class T>
struct Arith;

template <>
struct Arith<Rational> {
  static bool pos(const Rational& x) { return x > 0; }
  static bool neg(const Rational& x) { return x < 0; }
  static bool zero(const Rational& x) { return x == 0; }
};

template <>
struct Arith<double> {
  static constexpr double eps = 1e-10;
  static bool pos(double x) { return x > eps; }
  static bool neg(double x) { return x < -eps; }
  static bool zero(double x) { return std::abs(x) <= eps; }
};

namespace detail {

template <class T>
class Tableau {
  using A = Arith<T>;

 public:
  // rows_ x (cols_ + 1); last column is the right-hand side.
  std::vector<std::vector<T>> t;
  std::vector<T> cost;  // reduced costs, cost.back() = -objective value
  std::vector<std::size_t> basis;
  std::vector<bool> allowed;
  std::size_t cols = 0;

  void pivot(std::size_t r, std::size_t c) {
    T p = t[r][c];
    for (auto& v : t[r]) v /= p;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == r || A::zero(t[i][c])) continue;
      T f = t[i][c];
      for (std::size_t j = 0; j <= cols; ++j) {
        if (!A::zero(t[r][j])) t[i][j] -= f * t[r][j];
      }
    }
    if (!A::zero(cost[c])) {
      T f = cost[c];
      for (std::size_t j = 0; j <= cols; ++j) cost[j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  void price_out(const std::vector<T>& c) {
    cost.assign(cols + 1, T(0));
    for (std::size_t j = 0; j < cols; ++j) cost[j] = c[j];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const T& cb = c[basis[i]];
      if (A::zero(cb)) continue;
      for (std::size_t j = 0; j <= cols; ++j) cost[j] -= cb * t[i][j];
    }
  }

  /// Maximizes with Bland's rule; false when unbounded.
  bool run() {
    for (std::size_t iter = 0; iter < 100000; ++iter) {
      std::size_t enter = cols;
      for (std::size_t j = 0; j < cols; ++j) {
        if (allowed[j] && A::pos(cost[j])) {
          enter = j;
          break;
        }
      }
      if (enter == cols) return true;
      std::size_t leave = t.size();
      T best{};
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!A::pos(t[i][enter])) continue;
        T ratio = t[i][cols] / t[i][enter];
        if (leave == t.size() || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == t.size()) return false;
      pivot(leave, enter);
    }
    fail(ErrorCode::internal_invariant, "simplex iteration limit reached");
  }
};

}  // namespace detail

template <class T>
Solution<T> solve(const Program<T>& prog) {
  using A = Arith<T>;
  const std::size_t n = prog.vars();
  // Column layout: for each variable a positive part, plus a negative part if free.
  std::vector<std::size_t> pos_col(n), neg_col(n, SIZE_MAX);
  std::size_t structural = 0;
  for (std::size_t j = 0; j < n; ++j) {
    pos_col[j] = structural++;
    if (prog.free[j]) neg_col[j] = structural++;
  }

  struct Norm {
    std::vector<T> coef;
    Sense sense;
    T rhs;
  };
  std::vector<Norm> rows;
  rows.reserve(prog.rows.size());
  for (const auto& r : prog.rows) {
    if (r.coef.size() != n) fail(ErrorCode::internal_invariant, "LP row has the wrong width");
    Norm nr{std::vector<T>(structural, T(0)), r.sense, r.rhs};
    for (std::size_t j = 0; j < n; ++j) {
      nr.coef[pos_col[j]] = r.coef[j];
      if (prog.free[j]) nr.coef[neg_col[j]] = -r.coef[j];
    }
    bool flip = A::neg(nr.rhs) || (nr.sense == Sense::ge && A::zero(nr.rhs));
    if (flip) {
      for (auto& v : nr.coef) v = -v;
      nr.rhs = -nr.rhs;
      if (nr.sense == Sense::le) nr.sense = Sense::ge;
      else if (nr.sense == Sense::ge) nr.sense = Sense::le;
    }
    if (A::zero(nr.rhs)) nr.rhs = T(0);
    rows.push_back(std::move(nr));
  }

  const std::size_t m = rows.size();
  std::size_t slack_count = 0, art_count = 0;
  for (const auto& r : rows) {
    if (r.sense != Sense::eq) ++slack_count;
    if (r.sense != Sense::le) ++art_count;
  }
  detail::Tableau<T> tab;
  tab.cols = structural + slack_count + art_count;
  tab.t.assign(m, std::vector<T>(tab.cols + 1, T(0)));
  tab.basis.assign(m, 0);
  tab.allowed.assign(tab.cols, true);
  std::size_t next_slack = structural, next_art = structural + slack_count;
  const std::size_t first_art = next_art;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < structural; ++j) tab.t[i][j] = rows[i].coef[j];
    tab.t[i][tab.cols] = rows[i].rhs;
    switch (rows[i].sense) {
      case Sense::le:
        tab.t[i][next_slack] = T(1);
        tab.basis[i] = next_slack++;
        break;
      case Sense::ge:
        tab.t[i][next_slack++] = T(-1);
        tab.t[i][next_art] = T(1);
        tab.basis[i] = next_art++;
        break;
      case Sense::eq:
        tab.t[i][next_art] = T(1);
        tab.basis[i] = next_art++;
        break;
    }
  }

  Solution<T> out;
  if (art_count > 0) {
    std::vector<T> phase1(tab.cols, T(0));
    for (std::size_t j = first_art; j < tab.cols; ++j) phase1[j] = T(-1);
    tab.price_out(phase1);
    tab.run();
    // cost.back() holds minus the objective value.
    T value = -tab.cost[tab.cols];
    if (A::neg(value)) return out;
    // Drive remaining artificials out of the basis, dropping redundant rows.
    for (std::size_t i = 0; i < tab.t.size();) {
      if (tab.basis[i] < first_art) {
        ++i;
        continue;
      }
      std::size_t c = first_art;
      for (std::size_t j = 0; j < first_art; ++j) {
        if (!A::zero(tab.t[i][j])) {
          c = j;
          break;
        }
      }
      if (c < first_art) {
        tab.pivot(i, c);
        ++i;
      } else {
        tab.t.erase(tab.t.begin() + static_cast<std::ptrdiff_t>(i));
        tab.basis.erase(tab.basis.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    for (std::size_t j = first_art; j < tab.cols; ++j) tab.allowed[j] = false;
  }

  std::vector<T> phase2(tab.cols, T(0));
  for (std::size_t j = 0; j < n; ++j) {
    phase2[pos_col[j]] = prog.objective[j];
    if (prog.free[j]) phase2[neg_col[j]] = -prog.objective[j];
  }
  tab.price_out(phase2);
  if (!tab.run()) {
    out.outcome = Outcome::unbounded;
    return out;
  }
  std::vector<T> col_value(tab.cols, T(0));
  for (std::size_t i = 0; i < tab.t.size(); ++i) col_value[tab.basis[i]] = tab.t[i][tab.cols];
  out.x.assign(n, T(0));
  out.value = T(0);
  for (std::size_t j = 0; j < n; ++j) {
    out.x[j] = col_value[pos_col[j]];
    if (prog.free[j]) out.x[j] -= col_value[neg_col[j]];
    out.value += prog.objective[j] * out.x[j];
  }
  out.outcome = Outcome::optimal;
  return out;
}

/// Exact solving is used at desk scale (few variables per constraint block).
inline bool prefer_exact(std::size_t dimension, std::size_t constraints) {
  return dimension <= 6 && constraints <= 64;
}

}  // namespace choquet::lp
