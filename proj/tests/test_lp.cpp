#include "choquet/lp.hpp"

#include <doctest.h>

#include <random>

using namespace choquet;
using lp::Sense;

namespace {

// Best objective over all feasible intersections of two constraint lines
// (including the axes) of a 2-variable LP with x >= 0.
std::optional<double> vertex_oracle(const lp::Program<double>& p) {
  std::vector<std::array<double, 3>> lines;  // a x + b y = c
  for (const auto& r : p.rows) lines.push_back({r.coef[0], r.coef[1], r.rhs});
  lines.push_back({1, 0, 0});
  lines.push_back({0, 1, 0});
  std::optional<double> best;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      double det = lines[i][0] * lines[j][1] - lines[i][1] * lines[j][0];
      if (std::abs(det) < 1e-12) continue;
      double x = (lines[i][2] * lines[j][1] - lines[i][1] * lines[j][2]) / det;
      double y = (lines[i][0] * lines[j][2] - lines[i][2] * lines[j][0]) / det;
      if (x < -1e-9 || y < -1e-9) continue;
      bool ok = true;
      for (const auto& r : p.rows) {
        double lhs = r.coef[0] * x + r.coef[1] * y;
        if (r.sense == Sense::le && lhs > r.rhs + 1e-9) ok = false;
        if (r.sense == Sense::ge && lhs < r.rhs - 1e-9) ok = false;
        if (r.sense == Sense::eq && std::abs(lhs - r.rhs) > 1e-9) ok = false;
      }
      if (!ok) continue;
      double v = p.objective[0] * x + p.objective[1] * y;
      if (!best || v > *best) best = v;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("textbook maximization, exact") {
  lp::Program<Rational> p(2);
  p.objective = {3, 5};
  p.add({1, 0}, Sense::le, 4);
  p.add({0, 2}, Sense::le, 12);
  p.add({3, 2}, Sense::le, 18);
  auto s = lp::solve(p);
  REQUIRE(s.optimal());
  CHECK(s.value == 36);
  CHECK(s.x[0] == 2);
  CHECK(s.x[1] == 6);
}

TEST_CASE("equalities, free variables, infeasible and unbounded") {
  lp::Program<Rational> p(2);
  p.free[1] = true;
  p.objective = {0, -1};
  p.add({1, 1}, Sense::eq, Rational(1, 3));
  p.add({1, 0}, Sense::le, 1);
  auto s = lp::solve(p);
  REQUIRE(s.optimal());
  CHECK(s.x[1] == Rational(-2, 3));

  lp::Program<Rational> inf(1);
  inf.add({1}, Sense::ge, 2);
  inf.add({1}, Sense::le, 1);
  CHECK(lp::solve(inf).outcome == lp::Outcome::infeasible);

  lp::Program<double> unb(2);
  unb.objective = {1, 1};
  unb.add({1, -1}, Sense::le, 1);
  CHECK(lp::solve(unb).outcome == lp::Outcome::unbounded);
}

TEST_CASE("redundant equalities and degenerate vertices") {
  lp::Program<Rational> p(3);
  p.objective = {1, 1, 1};
  p.add({1, 1, 0}, Sense::eq, 1);
  p.add({2, 2, 0}, Sense::eq, 2);
  p.add({0, 0, 1}, Sense::le, 0);
  p.add({1, 0, 0}, Sense::ge, 0);
  auto s = lp::solve(p);
  REQUIRE(s.optimal());
  CHECK(s.value == 1);
}

TEST_CASE("random two-variable programs agree with vertex enumeration") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> coef(-5, 5), rhs(0, 10), cnt(1, 5), sense(0, 4);
  int solved = 0;
  for (int trial = 0; trial < 400; ++trial) {
    lp::Program<double> pd(2);
    lp::Program<Rational> pr(2);
    pd.objective = {double(coef(rng)), double(coef(rng))};
    pr.objective = {Rational(int(pd.objective[0])), Rational(int(pd.objective[1]))};
    // Box keeps every instance bounded.
    pd.add({1, 0}, Sense::le, 10);
    pd.add({0, 1}, Sense::le, 10);
    int k = cnt(rng);
    for (int i = 0; i < k; ++i) {
      int a = coef(rng), b = coef(rng), c = rhs(rng) - 3;
      int sidx = sense(rng);
      Sense sn = sidx == 0 ? Sense::eq : (sidx <= 2 ? Sense::le : Sense::ge);
      pd.add({double(a), double(b)}, sn, double(c));
    }
    for (const auto& r : pd.rows) pr.add({Rational(int(r.coef[0])), Rational(int(r.coef[1]))}, r.sense, Rational(int(r.rhs)));
    auto expect = vertex_oracle(pd);
    auto sd = lp::solve(pd);
    auto sr = lp::solve(pr);
    CHECK(sd.optimal() == expect.has_value());
    CHECK(sr.optimal() == expect.has_value());
    if (expect && sd.optimal() && sr.optimal()) {
      ++solved;
      CHECK(sd.value == doctest::Approx(*expect).epsilon(1e-9));
      CHECK(to_double(sr.value) == doctest::Approx(*expect).epsilon(1e-12));
    }
  }
  CHECK(solved > 100);
}
