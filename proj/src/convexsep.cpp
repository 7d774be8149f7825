#include "choquet/convexsep.hpp"

#include "choquet/error.hpp"
#include "choquet/lp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace choquet {

namespace {

template <class T>
T conv(double x);

template <>
Rational conv<Rational>(double x) {
  return rational_from_double(x);
}

template <>
double conv<double>(double x) {
  return x;
}

template <class T>
double to_d(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return x;
  } else {
    return to_double(x);
  }
}

struct Direction {
  std::size_t term;
  Vector g;
};

std::vector<Direction> all_directions(const ConeSum& cone) {
  std::vector<Direction> out;
  for (std::size_t i = 0; i < cone.terms().size(); ++i) {
    const auto& t = cone.terms()[i];
    if (!(t.mass > 0.0)) continue;
    for (const auto& v : t.set.generators) {
      Vector g(cone.dim());
      for (std::size_t j = 0; j < g.size(); ++j) g[j] = v[j] - t.base[j];
      out.push_back({i, std::move(g)});
    }
  }
  return out;
}

/// Largest total weight sum t_i among decompositions of z, or nothing if infeasible.
template <class T>
std::optional<std::vector<double>> decompose(const ConeSum& cone, const Vector& z) {
  const std::size_t n = cone.dim();
  std::vector<std::pair<std::size_t, const Vector*>> cols;
  for (std::size_t i = 0; i < cone.terms().size(); ++i) {
    const auto& t = cone.terms()[i];
    if (!(t.mass > 0.0)) continue;
    for (const auto& v : t.set.generators) cols.push_back({i, &v});
  }
  const std::size_t w = cols.size();
  lp::Program<T> prog(w + n);
  for (std::size_t k = 0; k < w; ++k) prog.objective[k] = T(1);
  for (std::size_t i = 0; i < cone.terms().size(); ++i) {
    const auto& t = cone.terms()[i];
    if (!(t.mass > 0.0)) continue;
    std::vector<T> row(w + n, T(0));
    for (std::size_t k = 0; k < w; ++k) {
      if (cols[k].first == i) row[k] = T(1);
    }
    prog.add(std::move(row), lp::Sense::le, conv<T>(t.mass));
  }
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<T> row(w + n, T(0));
    for (std::size_t k = 0; k < w; ++k) {
      const auto& t = cone.terms()[cols[k].first];
      row[k] = conv<T>((*cols[k].second)[j]) - conv<T>(t.base[j]);
    }
    row[w + j] = T(1);
    prog.add(std::move(row), lp::Sense::eq, conv<T>(z[j]));
  }
  auto sol = lp::solve(prog);
  if (!sol.optimal()) return std::nullopt;
  std::vector<double> t(cone.terms().size(), 0.0);
  for (std::size_t k = 0; k < w; ++k) t[cols[k].first] += to_d(sol.x[k]);
  if constexpr (std::is_same_v<T, double>) {
    // Residual check of the floating solution.
    for (std::size_t j = 0; j < n; ++j) {
      double acc = sol.x[w + j];
      if (acc < -1e-9) return std::nullopt;
      for (std::size_t k = 0; k < w; ++k) {
        acc += sol.x[k] * ((*cols[k].second)[j] - cone.terms()[cols[k].first].base[j]);
      }
      if (std::abs(acc - z[j]) > 1e-9 * (1.0 + std::abs(z[j]))) return std::nullopt;
    }
  }
  return t;
}

bool is_zero_vector(const Vector& z) {
  return std::all_of(z.begin(), z.end(), [](double x) { return x == 0.0; });
}

template <class T>
struct PriceSolve {
  bool has_price = false;
  std::vector<T> p;
  std::vector<T> y;  // mixture over directions when no price exists
  T margin{};
};

/// maximize v s.t. p . g_k >= v, p in the simplex.
template <class T>
lp::Solution<T> game(const std::vector<Direction>& dirs, std::size_t n) {
  lp::Program<T> prog(n + 1);
  prog.free[n] = true;
  prog.objective[n] = T(1);
  for (const auto& d : dirs) {
    std::vector<T> row(n + 1);
    for (std::size_t j = 0; j < n; ++j) row[j] = conv<T>(d.g[j]);
    row[n] = T(-1);
    prog.add(std::move(row), lp::Sense::ge, T(0));
  }
  std::vector<T> simplex(n + 1, T(1));
  simplex[n] = T(0);
  prog.add(std::move(simplex), lp::Sense::eq, T(1));
  return lp::solve(prog);
}

/// minimize z s.t. sum_k y_k g_kj <= z for every j, y in the simplex.
template <class T>
std::vector<T> mixture(const std::vector<Direction>& dirs, std::size_t n) {
  const std::size_t k = dirs.size();
  lp::Program<T> prog(k + 1);
  prog.free[k] = true;
  prog.objective[k] = T(-1);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<T> row(k + 1);
    for (std::size_t c = 0; c < k; ++c) row[c] = conv<T>(dirs[c].g[j]);
    row[k] = T(-1);
    prog.add(std::move(row), lp::Sense::le, T(0));
  }
  std::vector<T> simplex(k + 1, T(1));
  simplex[k] = T(0);
  prog.add(std::move(simplex), lp::Sense::eq, T(1));
  auto sol = lp::solve(prog);
  if (!sol.optimal()) fail(ErrorCode::internal_invariant, "mixture LP has no optimum");
  sol.x.pop_back();
  return sol.x;
}

PriceSolve<Rational> exact_price(const std::vector<Direction>& dirs, std::size_t n) {
  PriceSolve<Rational> out;
  auto g = game<Rational>(dirs, n);
  if (!g.optimal()) fail(ErrorCode::internal_invariant, "price LP has no optimum");
  out.margin = g.value;
  // Generators come from floating data, so a margin within rounding of zero
  // still counts as a price; the lexicographic steps then allow that slack.
  if (g.value < rational_from_double(-separation_tolerance)) {
    out.y = mixture<Rational>(dirs, n);
    return out;
  }
  out.has_price = true;
  const Rational floor = g.value < 0 ? g.value : Rational(0);
  // Lexicographically smallest feasible price.
  std::vector<Rational> fixed;
  for (std::size_t j = 0; j < n; ++j) {
    lp::Program<Rational> prog(n);
    prog.objective[j] = Rational(-1);
    for (const auto& d : dirs) {
      std::vector<Rational> row(n);
      for (std::size_t c = 0; c < n; ++c) row[c] = rational_from_double(d.g[c]);
      prog.add(std::move(row), lp::Sense::ge, floor);
    }
    prog.add(std::vector<Rational>(n, Rational(1)), lp::Sense::eq, Rational(1));
    for (std::size_t c = 0; c < fixed.size(); ++c) {
      std::vector<Rational> row(n, Rational(0));
      row[c] = 1;
      prog.add(std::move(row), lp::Sense::eq, fixed[c]);
    }
    auto sol = lp::solve(prog);
    if (!sol.optimal()) fail(ErrorCode::internal_invariant, "lexicographic price step infeasible");
    fixed.push_back(sol.x[j]);
  }
  out.p = std::move(fixed);
  return out;
}

PriceSolve<double> float_price(const std::vector<Direction>& dirs, std::size_t n) {
  PriceSolve<double> out;
  auto g = game<double>(dirs, n);
  if (!g.optimal()) fail(ErrorCode::internal_invariant, "price LP has no optimum");
  out.margin = g.value;
  if (g.value < -separation_tolerance) {
    out.y = mixture<double>(dirs, n);
    return out;
  }
  out.has_price = true;
  out.p.assign(g.x.begin(), g.x.begin() + static_cast<std::ptrdiff_t>(n));
  double sum = 0.0;
  for (auto& x : out.p) {
    x = std::max(0.0, x);
    sum += x;
  }
  for (auto& x : out.p) x /= sum;
  return out;
}

}  // namespace

// --------------------------------------------------------------------- ConeSum

ConeSum::ConeSum(std::size_t dim, std::vector<ConeTerm> terms) : dim_(dim), terms_(std::move(terms)) {
  if (dim == 0) fail(ErrorCode::invalid_argument, "cone sum needs a positive dimension");
  for (const auto& t : terms_) {
    if (t.base.size() != dim) fail(ErrorCode::invalid_argument, "cone term base has the wrong dimension");
    if (!(t.mass >= 0.0)) fail(ErrorCode::invalid_argument, "cone term mass must be nonnegative");
    for (const auto& v : t.set.generators) {
      if (v.size() != dim) fail(ErrorCode::invalid_argument, "generator has the wrong dimension");
    }
  }
}

std::vector<Vector> ConeSum::directions() const {
  std::vector<Vector> out;
  for (auto& d : all_directions(*this)) out.push_back(std::move(d.g));
  return out;
}

Verdict cone_membership(const ConeSum& cone, const Vector& z) {
  if (z.size() != cone.dim()) fail(ErrorCode::invalid_argument, "point has the wrong dimension");
  Verdict v;
  if (is_zero_vector(z)) {
    v.detail = "z = 0 with every t_i = 0";
    return v;
  }
  std::size_t rows = cone.dim() + cone.terms().size();
  bool exact = lp::prefer_exact(cone.dim(), rows);
  auto t = exact ? decompose<Rational>(cone, z) : decompose<double>(cone, z);
  double total = 0.0;
  if (t) {
    for (double x : *t) total += x;
  }
  if (!t || !(total > (exact ? 0.0 : 1e-12))) {
    v.status = Status::fail;
    v.detail = t ? "z is only reachable with all t_i = 0" : "no decomposition z = sum t_i (v_i - e_i)";
    return v;
  }
  for (std::size_t i = 0; i < t->size(); ++i) v.value("t" + std::to_string(i), (*t)[i]);
  v.detail = exact ? "exact decomposition found" : "decomposition found (floating)";
  return v;
}

Verdict convexity_probe(const ConeSum& cone, int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto member = [&] {
    Vector z(cone.dim(), 0.0);
    bool active = false;
    for (const auto& t : cone.terms()) {
      if (t.set.generators.empty() || !(t.mass > 0.0)) continue;
      double s = t.mass * unit(rng);
      std::vector<double> w(t.set.generators.size());
      double total = 0.0;
      for (auto& x : w) total += (x = unit(rng));
      for (std::size_t k = 0; k < w.size(); ++k) {
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += s * w[k] / total * (t.set.generators[k][j] - t.base[j]);
      }
      active = active || s > 0.0;
    }
    if (active) {
      for (auto& x : z) x += 0.1 * unit(rng);
    }
    return z;
  };
  Verdict v;
  v.seed = seed;
  for (int k = 0; k < trials; ++k) {
    Vector a = member(), b = member();
    double lambda = k == 0 ? 0.0 : (k == 1 ? 1.0 : unit(rng));
    Vector mix(cone.dim());
    for (std::size_t j = 0; j < mix.size(); ++j) mix[j] = lambda * a[j] + (1 - lambda) * b[j];
    ++v.cases;
    if (!cone_membership(cone, mix).passed()) {
      v.status = Status::fail;
      v.detail = "a convex combination of members left the set";
      v.value("lambda", lambda);
      return v;
    }
  }
  v.detail = "all sampled convex combinations are members";
  return v;
}

double SeparationResult::min_slack(const ConeSum& cone) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : cone.directions()) best = std::min(best, dot(price, g));
  return best;
}

SeparationResult separation_price(const ConeSum& cone) {
  const std::size_t n = cone.dim();
  auto dirs = all_directions(cone);
  SeparationResult out;
  if (dirs.empty()) {
    // Only the origin: every price works; the lexicographically smallest is e_n.
    out.has_price = true;
    out.exact = true;
    out.exact_price.assign(n, Rational(0));
    out.exact_price.back() = 1;
    out.price.assign(n, 0.0);
    out.price.back() = 1.0;
    return out;
  }
  out.exact = lp::prefer_exact(n, dirs.size() + 1);
  std::vector<double> y;
  if (out.exact) {
    auto s = exact_price(dirs, n);
    out.margin = to_double(s.margin);
    out.has_price = s.has_price;
    for (const auto& x : s.p) {
      out.exact_price.push_back(x);
      out.price.push_back(to_double(x));
    }
    for (const auto& x : s.y) y.push_back(to_double(x));
  } else {
    auto s = float_price(dirs, n);
    out.margin = s.margin;
    out.has_price = s.has_price;
    out.price = s.p;
    y = s.y;
  }
  if (out.has_price) return out;

  // Witness: sum_k y_k g_k is strictly negative; scale it into the cone.
  std::vector<double> weight(cone.terms().size(), 0.0);
  Vector w(n, 0.0);
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    weight[dirs[k].term] += y[k];
    for (std::size_t j = 0; j < n; ++j) w[j] += y[k] * dirs[k].g[j];
  }
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < weight.size(); ++i) {
    if (weight[i] > 0.0) c = std::min(c, cone.terms()[i].mass / weight[i]);
  }
  if (!std::isfinite(c) || !(c > 0.0)) fail(ErrorCode::internal_invariant, "witness scaling failed");
  // Shrink slightly and move toward zero so rounding stays inside the cone
  // (the cone is closed under adding nonnegative vectors).
  c *= 1.0 - 1e-9;
  for (auto& x : w) x *= c * (1.0 - 1e-9);
  out.witness = std::move(w);
  return out;
}

bool GammaReport::all_zero(double tol) const {
  return std::all_of(gamma.begin(), gamma.end(), [tol](double g) { return g >= -tol; });
}

GammaReport gamma_check(const ConeSum& cone, const Vector& price) {
  if (price.size() != cone.dim()) fail(ErrorCode::invalid_argument, "price has the wrong dimension");
  GammaReport out;
  for (const auto& t : cone.terms()) {
    double g = 0.0;
    std::optional<Vector> worst;
    const double pe = dot(price, t.base);
    for (const auto& v : t.set.generators) {
      double d = dot(price, v) - pe;
      if (d < g) {
        g = d;
        worst = v;
      }
    }
    out.gamma.push_back(g);
    out.violating.push_back(std::move(worst));
  }
  return out;
}

// --------------------------------------------------------------- RangeZonotope

RangeZonotope::RangeZonotope(Capacity mu, std::vector<Vector> block_values)
    : mu_(std::move(mu)), values_(std::move(block_values)) {
  if (mu_.kind() != CapacityKind::partitioned) fail(ErrorCode::precondition, "range zonotope needs a partitioned capacity");
  if (values_.size() != mu_.blocks().size() || values_.empty()) {
    fail(ErrorCode::invalid_argument, "one endowment vector per block is required");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i].size() != values_.front().size()) fail(ErrorCode::invalid_argument, "endowment dimensions differ");
    double m = mu_(mu_.blocks()[i]);
    Vector seg{m};
    for (double x : values_[i]) seg.push_back(m * x);
    segments_.push_back(std::move(seg));
  }
}

RangeZonotope RangeZonotope::from_allocation(const Capacity& mu, const Allocation& e) {
  if (mu.kind() != CapacityKind::partitioned) fail(ErrorCode::precondition, "range zonotope needs a partitioned capacity");
  std::vector<Vector> values;
  for (const auto& b : mu.blocks()) {
    auto v = e.constant_on(b);
    if (!v) fail(ErrorCode::precondition, "endowment is not constant on every block");
    values.push_back(*v);
  }
  return RangeZonotope(mu, std::move(values));
}

std::optional<Vector> RangeZonotope::coefficients(const Vector& target, double tol) const {
  const std::size_t d = dim(), r = segments_.size();
  if (target.size() != d) fail(ErrorCode::invalid_argument, "target has the wrong dimension");
  // minimize sum |residual| over s in [0,1]^r; variables s, plus, minus.
  lp::Program<Rational> prog(r + 2 * d);
  for (std::size_t j = 0; j < 2 * d; ++j) prog.objective[r + j] = Rational(-1);
  for (std::size_t i = 0; i < r; ++i) {
    std::vector<Rational> row(r + 2 * d, Rational(0));
    row[i] = 1;
    prog.add(std::move(row), lp::Sense::le, Rational(1));
  }
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<Rational> row(r + 2 * d, Rational(0));
    for (std::size_t i = 0; i < r; ++i) row[i] = rational_from_double(segments_[i][j]);
    row[r + j] = 1;
    row[r + d + j] = -1;
    prog.add(std::move(row), lp::Sense::eq, rational_from_double(target[j]));
  }
  auto sol = lp::solve(prog);
  if (!sol.optimal() || to_double(-sol.value) > tol) return std::nullopt;
  Vector s(r);
  for (std::size_t i = 0; i < r; ++i) s[i] = std::clamp(to_double(sol.x[i]), 0.0, 1.0);
  return s;
}

Vector RangeZonotope::image(const Region& a) const {
  Vector out{mu_(a)};
  for (std::size_t j = 0; j < values_.front().size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) acc += values_[i][j] * mu_(a & mu_.blocks()[i]);
    out.push_back(acc);
  }
  return out;
}

Region RangeZonotope::realize(const Vector& target) const {
  if (!mu_.semiconvex_constructive()) {
    fail(ErrorCode::unsupported_capacity, "realization needs block capacities that can be split");
  }
  auto s = coefficients(target);
  if (!s) fail(ErrorCode::precondition, "target is not in the range");
  Region out = Region::empty(mu_.universe());
  for (std::size_t i = 0; i < s->size(); ++i) out = out | split(mu_, mu_.blocks()[i], (*s)[i]);
  return out;
}

}  // namespace choquet
