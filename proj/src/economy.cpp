#include "choquet/economy.hpp"

#include "choquet/error.hpp"
#include "choquet/lp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace choquet {

namespace {

constexpr double verify_tol = 1e-9;

std::string fmt(const Vector& v) {
  std::ostringstream os;
  os.precision(12);
  os << '(';
  for (std::size_t j = 0; j < v.size(); ++j) os << (j ? ", " : "") << v[j];
  os << ')';
  return os.str();
}

Vector normalized(Vector v) {
  double s = std::accumulate(v.begin(), v.end(), 0.0);
  if (!(s > 0.0)) fail(ErrorCode::internal_invariant, "cannot normalize a zero price");
  for (auto& x : v) x /= s;
  return v;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

// Solves a square system by Gaussian elimination with partial pivoting.
std::optional<Vector> solve_square(std::vector<Vector> a, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    if (std::abs(a[piv][c]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      double f = a[r][c] / a[c][c];
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

void push_unique(std::vector<Vector>& out, const Vector& v, double tol = 1e-10) {
  for (const auto& w : out) {
    if (max_abs_diff(v, w) <= tol * (1.0 + std::abs(*std::max_element(w.begin(), w.end())))) return;
  }
  out.push_back(v);
}

// Vertices of { x >= 0 : a_k . x >= level - c_k for all k }.
std::vector<Vector> polyhedral_vertices(const PolyhedralUtility& u, double level) {
  const std::size_t n = u.dim();
  struct Half {
    Vector a;
    double b;
  };
  std::vector<Half> hs;
  for (const auto& p : u.pieces()) hs.push_back({p.slope, level - p.intercept});
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(n, 0.0);
    e[j] = 1.0;
    hs.push_back({e, 0.0});
  }
  std::vector<Vector> out;
  std::vector<std::size_t> pick(n);
  std::iota(pick.begin(), pick.end(), 0);
  const std::size_t m = hs.size();
  if (m < n) return out;
  while (true) {
    std::vector<Vector> a;
    Vector b;
    for (auto i : pick) {
      a.push_back(hs[i].a);
      b.push_back(hs[i].b);
    }
    if (auto x = solve_square(a, b)) {
      bool ok = true;
      for (const auto& h : hs) {
        if (dot(h.a, *x) < h.b - 1e-9 * (1.0 + std::abs(h.b))) {
          ok = false;
          break;
        }
      }
      if (ok) {
        for (auto& v : *x) v = std::max(v, 0.0);
        push_unique(out, *x);
      }
    }
    // Next n-subset in lexicographic order.
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == m - n + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return out;
}

std::vector<Vector> sample_directions(std::size_t n) {
  std::vector<Vector> dirs;
  if (n == 2) {
    for (int k = 0; k < tangent_samples; ++k) {
      double th = (k + 0.5) / tangent_samples * (std::acos(-1.0) / 2.0);
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  std::mt19937_64 rng(0x5eed);
  std::exponential_distribution<double> ex(1.0);
  dirs.push_back(Vector(n, 1.0));
  while (dirs.size() < static_cast<std::size_t>(tangent_samples)) {
    Vector d(n);
    for (auto& x : d) x = ex(rng) + 1e-3;
    dirs.push_back(d);
  }
  return dirs;
}

}  // namespace

const char* to_string(PreferenceKind k) noexcept {
  switch (k) {
    case PreferenceKind::polyhedral: return "polyhedral";
    case PreferenceKind::cobb_douglas: return "cobb_douglas";
    case PreferenceKind::linear: return "linear";
    case PreferenceKind::coordinate_list: return "coordinate_list";
  }
  return "?";
}

// ---- Preference ----

Preference Preference::polyhedral(PolyhedralUtility u) {
  Preference p(PreferenceKind::polyhedral, u.dim());
  p.poly_ = std::move(u);
  return p;
}

Preference Preference::cobb_douglas(Vector alpha) {
  if (alpha.size() < 2) fail(ErrorCode::malformed_utility, "cobb_douglas needs at least two commodities");
  double s = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0 && a < 1.0)) fail(ErrorCode::malformed_utility, "cobb_douglas exponents must lie in (0,1)");
    s += a;
  }
  if (std::abs(s - 1.0) > 1e-12) fail(ErrorCode::malformed_utility, "cobb_douglas exponents must sum to 1");
  Preference p(PreferenceKind::cobb_douglas, alpha.size());
  p.params_ = std::move(alpha);
  return p;
}

Preference Preference::linear(Vector c) {
  if (c.empty()) fail(ErrorCode::malformed_utility, "linear utility needs coefficients");
  bool any = false;
  for (double x : c) {
    if (!(x >= 0.0) || !std::isfinite(x)) fail(ErrorCode::malformed_utility, "linear utility coefficients must be >= 0");
    any = any || x > 0.0;
  }
  if (!any) fail(ErrorCode::malformed_utility, "linear utility coefficients are all zero");
  Preference p(PreferenceKind::linear, c.size());
  p.params_ = std::move(c);
  return p;
}

Preference Preference::coordinate_list(std::vector<int> coords, std::size_t dim) {
  if (coords.empty()) fail(ErrorCode::invalid_argument, "coordinate list is empty");
  std::sort(coords.begin(), coords.end());
  for (std::size_t k = 0; k < coords.size(); ++k) {
    if (coords[k] < 0 || static_cast<std::size_t>(coords[k]) >= dim) {
      fail(ErrorCode::invalid_argument, "coordinate " + std::to_string(coords[k]) + " out of range");
    }
    if (k > 0 && coords[k] == coords[k - 1]) fail(ErrorCode::invalid_argument, "coordinate list repeats an index");
  }
  Preference p(PreferenceKind::coordinate_list, dim);
  p.coords_ = std::move(coords);
  return p;
}

bool Preference::homogeneous() const {
  if (kind_ != PreferenceKind::polyhedral) return true;
  for (const auto& pc : poly_->pieces()) {
    if (pc.intercept != 0.0) return false;
  }
  return true;
}

double Preference::utility(const Vector& x) const {
  if (x.size() != dim_) fail(ErrorCode::invalid_argument, "bundle has the wrong dimension");
  switch (kind_) {
    case PreferenceKind::polyhedral: return (*poly_)(x);
    case PreferenceKind::cobb_douglas: {
      double u = 1.0;
      for (std::size_t j = 0; j < dim_; ++j) {
        if (x[j] <= 0.0) return 0.0;
        u *= std::pow(x[j], params_[j]);
      }
      return u;
    }
    case PreferenceKind::linear: return dot(params_, x);
    case PreferenceKind::coordinate_list: break;
  }
  fail(ErrorCode::precondition, "coordinate-list preferences have no utility");
}

bool Preference::prefers(const Vector& x, const Vector& y) const {
  if (kind_ == PreferenceKind::coordinate_list) {
    for (int j : coords_) {
      if (!(x[j] > y[j])) return false;
    }
    return true;
  }
  return utility(x) > utility(y);
}

std::optional<Vector> Preference::supporting_price(const Vector& x) const {
  switch (kind_) {
    case PreferenceKind::cobb_douglas: {
      double u = utility(x);
      if (!(u > 0.0)) return std::nullopt;
      Vector g(dim_);
      for (std::size_t j = 0; j < dim_; ++j) g[j] = params_[j] * u / x[j];
      return normalized(g);
    }
    case PreferenceKind::linear: return normalized(params_);
    case PreferenceKind::polyhedral: {
      double u = (*poly_)(x);
      std::optional<Vector> slope;
      for (const auto& pc : poly_->pieces()) {
        if (dot(pc.slope, x) + pc.intercept > u + 1e-12 * (1.0 + std::abs(u))) continue;
        if (slope && max_abs_diff(*slope, pc.slope) > 1e-12) return std::nullopt;
        slope = pc.slope;
      }
      if (!slope || std::accumulate(slope->begin(), slope->end(), 0.0) <= 0.0) return std::nullopt;
      return normalized(*slope);
    }
    case PreferenceKind::coordinate_list: return std::nullopt;
  }
  return std::nullopt;
}

bool operator==(const Preference& a, const Preference& b) {
  if (a.kind_ != b.kind_ || a.dim_ != b.dim_ || a.params_ != b.params_ || a.coords_ != b.coords_) return false;
  if (a.kind_ != PreferenceKind::polyhedral) return true;
  const auto& pa = a.poly_->pieces();
  const auto& pb = b.poly_->pieces();
  if (pa.size() != pb.size()) return false;
  for (std::size_t k = 0; k < pa.size(); ++k) {
    if (pa[k].slope != pb[k].slope || pa[k].intercept != pb[k].intercept) return false;
  }
  return true;
}

UpperSet upper_set(const Preference& pref, const Vector& f, double margin) {
  const std::size_t n = pref.dim();
  UpperSet out;
  switch (pref.kind()) {
    case PreferenceKind::coordinate_list: {
      Vector g(n, 0.0);
      for (int j : pref.coords()) g[j] = f[j] + margin;
      out.generators.push_back(g);
      return out;
    }
    case PreferenceKind::linear: {
      double level = pref.utility(f) + margin;
      if (level <= 0.0) {
        out.generators.push_back(Vector(n, 0.0));
        return out;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (pref.parameters()[j] <= 0.0) continue;
        Vector g(n, 0.0);
        g[j] = level / pref.parameters()[j];
        out.generators.push_back(g);
      }
      return out;
    }
    case PreferenceKind::polyhedral:
      out.generators = polyhedral_vertices(*pref.polyhedral_utility(), pref.utility(f) + margin);
      return out;
    case PreferenceKind::cobb_douglas: {
      double level = pref.utility(f) + margin;
      if (level <= 0.0) {
        out.generators.push_back(Vector(n, 0.0));
        return out;
      }
      // Points on the level curve along sampled rays; their hull lies inside
      // the convex upper level set.
      auto dirs = sample_directions(n);
      bool interior = std::all_of(f.begin(), f.end(), [](double x) { return x > 0.0; });
      if (interior) dirs.push_back(f);
      for (const auto& d : dirs) {
        double ud = pref.utility(d);
        Vector g(n);
        for (std::size_t j = 0; j < n; ++j) g[j] = d[j] * level / ud;
        out.generators.push_back(g);
      }
      return out;
    }
  }
  return out;
}

// ---- Economy ----

namespace {

void validate_blocks(const std::vector<EconomyBlock>& blocks) {
  if (blocks.empty()) fail(ErrorCode::invalid_argument, "economy needs at least one block");
  const std::size_t n = blocks.front().endowment.size();
  if (n == 0) fail(ErrorCode::invalid_argument, "endowments must have at least one commodity");
  bool any_list = false, all_list = true;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    std::string where = "block " + std::to_string(i);
    if (!(b.mass > 0.0) || !std::isfinite(b.mass)) fail(ErrorCode::invalid_argument, where + ": mass must be positive");
    if (b.endowment.size() != n) fail(ErrorCode::invalid_argument, where + ": endowment has the wrong dimension");
    for (double x : b.endowment) {
      if (!(x > 0.0) || !std::isfinite(x)) {
        fail(ErrorCode::invalid_argument, where + ": endowment must be strictly positive");
      }
    }
    if (b.preference.dim() != n) fail(ErrorCode::invalid_argument, where + ": preference has the wrong dimension");
    bool list = b.preference.kind() == PreferenceKind::coordinate_list;
    any_list = any_list || list;
    all_list = all_list && list;
  }
  if (any_list && !all_list) {
    fail(ErrorCode::invalid_argument, "coordinate-list preferences cannot be mixed with utilities");
  }
  if (any_list) {
    std::vector<int> common = blocks.front().preference.coords();
    for (const auto& b : blocks) {
      std::vector<int> next;
      std::set_intersection(common.begin(), common.end(), b.preference.coords().begin(),
                            b.preference.coords().end(), std::back_inserter(next));
      common = std::move(next);
    }
    if (common.empty()) fail(ErrorCode::invalid_argument, "coordinate lists have no common coordinate");
  }
}

}  // namespace

Economy::Economy(Capacity mu, std::vector<Region> regions, std::vector<EconomyBlock> blocks, bool continuum)
    : mu_(std::move(mu)), regions_(std::move(regions)), blocks_(std::move(blocks)), continuum_(continuum) {}

Economy Economy::continuum(std::vector<EconomyBlock> blocks, ConcaveFunction gamma) {
  validate_blocks(blocks);
  const long r = static_cast<long>(blocks.size());
  std::vector<Region> regions;
  std::vector<Capacity> parts;
  double width = gamma(1.0 / static_cast<double>(r));
  if (!(width > 0.0)) fail(ErrorCode::invalid_argument, "distortion vanishes on a strip");
  for (long i = 0; i < r; ++i) {
    Rect strip{Rational(i, r), Rational(i + 1, r), Rational(0), Rational(1)};
    regions.emplace_back(RectUnion::from_rects(std::span<const Rect>(&strip, 1)));
    parts.push_back(Capacity::product_section(gamma, blocks[i].mass / width));
  }
  Capacity mu = Capacity::partitioned(regions, std::move(parts));
  return Economy(std::move(mu), std::move(regions), std::move(blocks), true);
}

Economy Economy::atomic(std::vector<EconomyBlock> blocks, int atoms_per_block, ConcaveFunction gamma) {
  validate_blocks(blocks);
  const int r = static_cast<int>(blocks.size());
  if (atoms_per_block < 1) fail(ErrorCode::invalid_argument, "atoms per block must be positive");
  const int n = r * atoms_per_block;
  if (n > 16) fail(ErrorCode::invalid_argument, "atomic economies are limited to 16 atoms");
  double top = gamma(1.0);
  std::vector<Region> regions;
  std::vector<Capacity> parts;
  for (int i = 0; i < r; ++i) {
    std::uint64_t block_mask = ((std::uint64_t{1} << atoms_per_block) - 1) << (i * atoms_per_block);
    regions.emplace_back(AtomSet(n, block_mask));
    std::vector<Rational> table(std::size_t{1} << n);
    for (std::uint64_t m = 0; m < table.size(); ++m) {
      int c = std::popcount(m & block_mask);
      table[m] = rational_from_double(blocks[i].mass * gamma(static_cast<double>(c) / atoms_per_block) / top);
    }
    parts.push_back(Capacity::explicit_table(n, std::move(table)));
  }
  Capacity mu = Capacity::partitioned(regions, std::move(parts));
  return Economy(std::move(mu), std::move(regions), std::move(blocks), false);
}

Allocation Economy::endowment() const {
  std::vector<Vector> e;
  for (const auto& b : blocks_) e.push_back(b.endowment);
  return Allocation::block_constant(regions_, e);
}

Allocation Economy::simple(const std::vector<Vector>& bundles) const {
  if (bundles.size() != blocks_.size()) fail(ErrorCode::invalid_argument, "need one bundle per block");
  for (const auto& b : bundles) {
    if (b.size() != dim()) fail(ErrorCode::invalid_argument, "bundle has the wrong dimension");
  }
  return Allocation::block_constant(regions_, bundles);
}

bool Economy::block_constant(const Allocation& f) const {
  for (const auto& r : regions_) {
    if (!f.constant_on(r)) return false;
  }
  return true;
}

std::vector<Vector> Economy::bundles(const Allocation& f) const {
  if (f.dim() != dim()) fail(ErrorCode::invalid_argument, "allocation has the wrong dimension");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    auto v = f.constant_on(regions_[i]);
    if (!v) {
      fail(ErrorCode::precondition,
           "allocation is not constant on block " + std::to_string(i) + "; use average_allocation first");
    }
    out.push_back(*v);
  }
  return out;
}

// ---- operations ----

Verdict feasibility(const Economy& eco, const Allocation& f) {
  if (f.dim() != eco.dim()) fail(ErrorCode::invalid_argument, "allocation has the wrong dimension");
  Vector lhs = vector_integral(eco.capacity(), f);
  Vector rhs = vector_integral(eco.capacity(), eco.endowment());
  Verdict v;
  double worst = 0.0;
  for (std::size_t j = 0; j < lhs.size(); ++j) {
    double r = lhs[j] - rhs[j];
    v.value("residual[" + std::to_string(j) + "]", r);
    worst = std::max(worst, std::abs(r) / std::max(1.0, std::abs(rhs[j])));
  }
  if (worst > 1e-12) {
    v.status = Status::fail;
    v.detail = "aggregate " + fmt(lhs) + " differs from endowment aggregate " + fmt(rhs);
    v.witness.emplace_back("X", Region::full(eco.capacity().universe()));
  } else {
    v.detail = "aggregate bundle equals the endowment aggregate";
  }
  return v;
}

Allocation average_allocation(const Economy& eco, const Allocation& f) {
  std::vector<Vector> means;
  const Region all = Region::full(eco.capacity().universe());
  for (std::size_t i = 0; i < eco.size(); ++i) means.push_back(mean_value(eco.capacity(), f, all, i));
  Allocation avg = eco.simple(means);
  Vector a = vector_integral(eco.capacity(), f);
  Vector b = vector_integral(eco.capacity(), avg);
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (std::abs(a[j] - b[j]) > 1e-9 * (1.0 + std::abs(a[j]))) {
      fail(ErrorCode::internal_invariant, "averaging changed the aggregate bundle");
    }
  }
  return avg;
}

BudgetResult budget_max(const Economy& eco, std::size_t block, const Vector& price) {
  if (block >= eco.size()) fail(ErrorCode::invalid_argument, "block index out of range");
  const auto& b = eco.blocks()[block];
  const auto& pref = b.preference;
  const std::size_t n = eco.dim();
  if (price.size() != n) fail(ErrorCode::invalid_argument, "price has the wrong dimension");
  for (double p : price) {
    if (!(p >= 0.0) || !std::isfinite(p)) fail(ErrorCode::invalid_argument, "price components must be >= 0");
  }
  const double wealth = dot(price, b.endowment);
  BudgetResult out;
  switch (pref.kind()) {
    case PreferenceKind::coordinate_list:
      fail(ErrorCode::unsupported_capacity, "budget maximization is not defined for coordinate-list preferences");
    case PreferenceKind::cobb_douglas: {
      out.bundle.assign(n, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (!(price[j] > 0.0)) {
          out.bounded = false;
          out.value = std::numeric_limits<double>::infinity();
          return out;
        }
        out.bundle[j] = pref.parameters()[j] * wealth / price[j];
      }
      out.value = pref.utility(out.bundle);
      return out;
    }
    case PreferenceKind::linear: {
      const auto& c = pref.parameters();
      std::size_t best = n;
      double ratio = -1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (c[j] <= 0.0) continue;
        if (!(price[j] > 0.0)) {
          out.bounded = false;
          out.value = std::numeric_limits<double>::infinity();
          return out;
        }
        if (c[j] / price[j] > ratio) {
          ratio = c[j] / price[j];
          best = j;
        }
      }
      out.bundle.assign(n, 0.0);
      out.bundle[best] = wealth / price[best];
      out.value = pref.utility(out.bundle);
      return out;
    }
    case PreferenceKind::polyhedral: {
      // maximize t subject to t <= a_k . x + c_k and p . x <= p . e.
      const auto& pieces = pref.polyhedral_utility()->pieces();
      auto build = [&](auto conv) {
        using T = decltype(conv(0.0));
        lp::Program<T> prog(n + 1);
        prog.free[n] = true;
        prog.objective[n] = T(1);
        for (const auto& pc : pieces) {
          std::vector<T> row(n + 1);
          for (std::size_t j = 0; j < n; ++j) row[j] = -conv(pc.slope[j]);
          row[n] = T(1);
          prog.add(std::move(row), lp::Sense::le, conv(pc.intercept));
        }
        std::vector<T> budget(n + 1, T(0));
        T w(0);
        for (std::size_t j = 0; j < n; ++j) {
          budget[j] = conv(price[j]);
          w += conv(price[j]) * conv(b.endowment[j]);
        }
        prog.add(std::move(budget), lp::Sense::le, w);
        return lp::solve(prog);
      };
      auto finish = [&](const auto& sol) {
        if (sol.outcome == lp::Outcome::unbounded) {
          out.bounded = false;
          out.value = std::numeric_limits<double>::infinity();
          return;
        }
        if (!sol.optimal()) fail(ErrorCode::internal_invariant, "budget problem reported infeasible");
        out.bundle.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) out.bundle[j] = static_cast<double>(sol.x[j]);
        out.value = static_cast<double>(sol.value);
      };
      if (lp::prefer_exact(n + 1, pieces.size() + 1)) {
        auto sol = build([](double x) { return rational_from_double(x); });
        lp::Solution<double> d;
        d.outcome = sol.outcome;
        d.value = to_double(sol.value);
        for (const auto& x : sol.x) d.x.push_back(to_double(x));
        finish(d);
      } else {
        finish(build([](double x) { return x; }));
      }
      return out;
    }
  }
  return out;
}

WalrasCertificate walras_check(const Economy& eco, const Allocation& f, const Vector& price) {
  const std::size_t n = eco.dim();
  if (price.size() != n) fail(ErrorCode::invalid_argument, "price has the wrong dimension");
  double psum = 0.0;
  for (double p : price) {
    if (!(p >= 0.0) || !std::isfinite(p)) fail(ErrorCode::invalid_argument, "price components must be >= 0");
    psum += p;
  }
  if (!(psum > 0.0)) fail(ErrorCode::invalid_argument, "price is zero");

  WalrasCertificate cert;
  cert.price = price;
  Allocation g = f;
  std::vector<std::string> problems;
  if (!eco.block_constant(f)) {
    g = average_allocation(eco, f);
    cert.averaged = true;
    problems.push_back("warning: allocation was not simple and has been averaged");
  }
  cert.bundles = eco.bundles(g);

  Vector lhs = vector_integral(eco.capacity(), g);
  Vector rhs = vector_integral(eco.capacity(), eco.endowment());
  cert.feasibility_residual = max_abs_diff(lhs, rhs);
  bool ok = cert.feasibility_residual <= verify_tol;
  if (!ok) problems.push_back("infeasible: residual " + std::to_string(cert.feasibility_residual));

  for (std::size_t i = 0; i < eco.size(); ++i) {
    const auto& b = eco.blocks()[i];
    const Vector& w = cert.bundles[i];
    double slack = dot(price, b.endowment) - dot(price, w);
    cert.budget_slack.push_back(slack);
    if (slack < -verify_tol) {
      ok = false;
      problems.push_back("block " + std::to_string(i) + " exceeds its budget by " + std::to_string(-slack));
    }
    if (b.preference.kind() == PreferenceKind::coordinate_list) {
      // x beats w_i iff x_J > w_J, so inf p.x over that set is sum_J p_j w_j,
      // approached but never attained once p charges some listed coordinate.
      double charged = 0.0, floor = 0.0;
      for (int j : b.preference.coords()) {
        charged += price[j];
        floor += price[j] * w[j];
      }
      double wealth = dot(price, b.endowment);
      cert.utility.push_back(std::numeric_limits<double>::quiet_NaN());
      cert.optimum.push_back(floor);
      cert.gap.push_back(wealth - floor);
      if (!(charged > 0.0) || floor < wealth - verify_tol) {
        ok = false;
        problems.push_back("block " + std::to_string(i) +
                           ": some strictly preferred bundle is affordable at this price");
      }
      continue;
    }
    double u = b.preference.utility(w);
    BudgetResult best = budget_max(eco, i, price);
    cert.utility.push_back(u);
    cert.optimum.push_back(best.value);
    cert.gap.push_back(best.value - u);
    if (!best.bounded) {
      ok = false;
      problems.push_back("block " + std::to_string(i) + ": utility is unbounded on the budget set");
    } else if (best.value - u > verify_tol) {
      ok = false;
      problems.push_back("block " + std::to_string(i) + ": bundle " + fmt(best.bundle) + " is affordable with gap " +
                         std::to_string(best.value - u));
    }
  }
  cert.status = ok ? Status::pass : Status::fail;
  for (std::size_t k = 0; k < problems.size(); ++k) cert.detail += (k ? "; " : "") + problems[k];
  if (cert.detail.empty()) cert.detail = "every block bundle is budget-maximal";
  return cert;
}

// ---- improvement search ----

namespace {

struct Pool {
  Region region;
  double mass = 0.0;
  // Positive-mass values of f inside the pool.
  std::vector<Vector> values;
};

// Positive-mass pieces of f inside block i.
std::vector<VectorPiece> block_pieces(const Economy& eco, const Allocation& f, std::size_t i) {
  std::vector<VectorPiece> out;
  for (const auto& pc : f.completed()) {
    Region r = pc.region & eco.regions()[i];
    if (r.empty() || !(eco.capacity()(r) > 0.0)) continue;
    out.push_back({r, pc.value});
  }
  return out;
}

Pool make_pool(const Economy& eco, const std::vector<VectorPiece>& pieces) {
  Pool p;
  p.region = Region::empty(eco.capacity().universe());
  for (const auto& pc : pieces) {
    p.region = p.region | pc.region;
    p.values.push_back(pc.value);
  }
  p.mass = p.values.empty() ? 0.0 : eco.capacity()(p.region);
  return p;
}

// Feasibility of sum_i sum_k w_ik v_ik <= sum_i s_i e_i with sum_k w_ik = s_i.
std::optional<std::vector<Vector>> weak_bundles(const Economy& eco, const std::vector<UpperSet>& sets,
                                                const Vector& s) {
  const std::size_t n = eco.dim();
  std::vector<std::pair<std::size_t, std::size_t>> cols;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (s[i] <= 0.0) continue;
    for (std::size_t k = 0; k < sets[i].generators.size(); ++k) cols.emplace_back(i, k);
  }
  if (cols.empty()) return std::nullopt;
  lp::Program<double> prog(cols.size());
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(cols.size());
    double rhs = 0.0;
    for (std::size_t c = 0; c < cols.size(); ++c) row[c] = sets[cols[c].first].generators[cols[c].second][j];
    for (std::size_t i = 0; i < sets.size(); ++i) rhs += s[i] * eco.blocks()[i].endowment[j];
    prog.add(std::move(row), lp::Sense::le, rhs);
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (s[i] <= 0.0) continue;
    std::vector<double> row(cols.size(), 0.0);
    for (std::size_t c = 0; c < cols.size(); ++c) row[c] = cols[c].first == i ? 1.0 : 0.0;
    prog.add(std::move(row), lp::Sense::eq, s[i]);
  }
  auto sol = lp::solve(prog);
  if (!sol.optimal()) return std::nullopt;
  std::vector<Vector> g(sets.size(), Vector(n, 0.0));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    auto [i, k] = cols[c];
    for (std::size_t j = 0; j < n; ++j) g[i][j] += std::max(sol.x[c], 0.0) * sets[i].generators[k][j] / s[i];
  }
  // Hand the unused surplus to the first member block: monotonicity keeps the
  // bundle preferred and the coalition balance becomes an equality.
  std::size_t first = 0;
  while (s[first] <= 0.0) ++first;
  for (std::size_t j = 0; j < n; ++j) {
    double surplus = 0.0;
    for (std::size_t i = 0; i < sets.size(); ++i) surplus += s[i] * (eco.blocks()[i].endowment[j] - g[i][j]);
    if (surplus > 0.0) g[first][j] += surplus / s[first];
  }
  return g;
}

// Relaxation over all mass directions: normalizing sum s_i = 1 is harmless
// because the conditions are homogeneous in (s, w).
std::optional<Vector> continuous_masses(const Economy& eco, const std::vector<UpperSet>& sets,
                                        const std::vector<Pool>& pools) {
  const std::size_t n = eco.dim();
  std::vector<std::pair<std::size_t, std::size_t>> cols;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (!(pools[i].mass > 0.0)) continue;
    for (std::size_t k = 0; k < sets[i].generators.size(); ++k) cols.emplace_back(i, k);
  }
  if (cols.empty()) return std::nullopt;
  lp::Program<double> prog(cols.size());
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> row(cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      auto [i, k] = cols[c];
      row[c] = sets[i].generators[k][j] - eco.blocks()[i].endowment[j];
    }
    prog.add(std::move(row), lp::Sense::le, 0.0);
  }
  prog.add(std::vector<double>(cols.size(), 1.0), lp::Sense::eq, 1.0);
  auto sol = lp::solve(prog);
  if (!sol.optimal()) return std::nullopt;
  Vector s(sets.size(), 0.0);
  for (std::size_t c = 0; c < cols.size(); ++c) s[cols[c].first] += std::max(sol.x[c], 0.0);
  return s;
}

// Distinct masses mu(A) for A inside an atomic pool, ascending.
std::vector<double> atomic_masses(const Capacity& mu, const Region& pool) {
  std::vector<double> out;
  const auto members = pool.atoms().members();
  const int n = pool.atoms().universe_size();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << members.size()); ++m) {
    std::uint64_t mask = 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if ((m >> k) & 1U) mask |= std::uint64_t{1} << members[k];
    }
    out.push_back(mu(Region(AtomSet(n, mask))));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12; }),
            out.end());
  return out;
}

std::optional<Region> atomic_subset_with_mass(const Capacity& mu, const Region& pool, double s) {
  const auto members = pool.atoms().members();
  const int n = pool.atoms().universe_size();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << members.size()); ++m) {
    std::uint64_t mask = 0;
    for (std::size_t k = 0; k < members.size(); ++k) {
      if ((m >> k) & 1U) mask |= std::uint64_t{1} << members[k];
    }
    Region r(AtomSet(n, mask));
    if (std::abs(mu(r) - s) <= 1e-12) return r;
  }
  return std::nullopt;
}

}  // namespace

CoreVerdict improvement_oracle(const Economy& eco, const Allocation& f, ImprovementMode mode, int grid) {
  if (grid < 1) fail(ErrorCode::invalid_argument, "grid must be positive");
  if (f.dim() != eco.dim()) fail(ErrorCode::invalid_argument, "allocation has the wrong dimension");
  const std::size_t r = eco.size();
  CoreVerdict out;
  out.mode = mode;
  out.masses.assign(r, 0.0);
  out.bundles.assign(r, Vector(eco.dim(), 0.0));

  if (mode == ImprovementMode::strong) {
    // Blockwise balance forces g_i = e_i, so members are the agents who
    // strictly prefer their endowment to what f gives them.
    for (std::size_t i = 0; i < r; ++i) {
      const auto& b = eco.blocks()[i];
      std::vector<VectorPiece> worse;
      for (auto& pc : block_pieces(eco, f, i)) {
        if (b.preference.prefers(b.endowment, pc.value)) worse.push_back(std::move(pc));
      }
      Pool p = make_pool(eco, worse);
      out.pools.push_back(p.region);
      out.masses[i] = p.mass;
      out.bundles[i] = b.endowment;
      if (p.mass > 0.0) out.improved = true;
    }
    out.coalitions_tested = 1;
    out.detail = out.improved ? "blocks preferring their endowment form a strongly improving coalition"
                              : "no block strictly prefers its endowment on a set of positive capacity";
    return out;
  }

  // Weak mode: members of block i come from the pieces where f is worst for
  // them, and must reach the upper set above every such piece.
  std::vector<Pool> pools;
  std::vector<UpperSet> sets;
  for (std::size_t i = 0; i < r; ++i) {
    const auto& pref = eco.blocks()[i].preference;
    auto pieces = block_pieces(eco, f, i);
    std::vector<VectorPiece> worst;
    Vector target(eco.dim(), 0.0);
    if (pref.has_utility()) {
      double lo = std::numeric_limits<double>::infinity();
      for (const auto& pc : pieces) lo = std::min(lo, pref.utility(pc.value));
      for (auto& pc : pieces) {
        if (pref.utility(pc.value) <= lo) worst.push_back(std::move(pc));
      }
      if (!worst.empty()) target = worst.front().value;
    } else {
      worst = std::move(pieces);
      for (const auto& pc : worst) {
        for (std::size_t j = 0; j < target.size(); ++j) target[j] = std::max(target[j], pc.value[j]);
      }
    }
    pools.push_back(make_pool(eco, worst));
    out.pools.push_back(pools.back().region);
    sets.push_back(upper_set(pref, target, strict_margin));
  }

  auto relaxed = continuous_masses(eco, sets, pools);
  out.coalitions_tested = 1;
  if (!relaxed) {
    out.detail = "no coalition of any block masses admits balanced improving bundles";
    return out;
  }

  // Candidate masses per block, scanned lexicographically.
  std::vector<std::vector<double>> levels(r);
  for (std::size_t i = 0; i < r; ++i) {
    if (!(pools[i].mass > 0.0)) {
      levels[i] = {0.0};
    } else if (eco.continuum_mode()) {
      double step = eco.capacity()(eco.regions()[i]) / grid;
      for (int k = 0; k <= grid && k * step <= pools[i].mass * (1.0 + 1e-12); ++k) levels[i].push_back(k * step);
    } else {
      levels[i] = atomic_masses(eco.capacity(), pools[i].region);
    }
  }
  std::vector<std::size_t> idx(r, 0);
  while (true) {
    std::size_t k = r;
    while (k > 0 && idx[k - 1] + 1 == levels[k - 1].size()) {
      idx[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
    ++idx[k - 1];
    Vector s(r);
    for (std::size_t i = 0; i < r; ++i) s[i] = levels[i][idx[i]];
    ++out.coalitions_tested;
    if (auto g = weak_bundles(eco, sets, s)) {
      out.improved = true;
      out.masses = s;
      out.bundles = *g;
      out.detail = "improving coalition found on the mass grid";
      return out;
    }
  }

  if (eco.continuum_mode()) {
    // Every mass up to mu(P_i) is attained, so the relaxed direction can be
    // scaled into the pools.
    Vector s = *relaxed;
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r; ++i) {
      if (s[i] > 0.0) c = std::min(c, pools[i].mass / s[i]);
    }
    for (auto& x : s) x *= c;
    if (auto g = weak_bundles(eco, sets, s)) {
      out.improved = true;
      out.on_grid = false;
      out.masses = s;
      out.bundles = *g;
      out.detail = "improving coalition found between grid points";
      return out;
    }
  }
  out.detail = "no improving coalition at this resolution";
  return out;
}

Verdict verify_improvement(const Economy& eco, const Allocation& f, const CoreVerdict& w, ImprovementMode as) {
  Verdict v;
  if (!w.improved) {
    v.status = Status::fail;
    v.detail = "verdict carries no improvement";
    return v;
  }
  const auto& mu = eco.capacity();
  const std::size_t r = eco.size();
  if (w.masses.size() != r || w.bundles.size() != r || w.pools.size() != r) {
    fail(ErrorCode::invalid_argument, "witness does not match the economy");
  }
  std::vector<Region> parts;
  Region s_all = Region::empty(mu.universe());
  for (std::size_t i = 0; i < r; ++i) {
    Region part = Region::empty(mu.universe());
    double s = w.masses[i];
    if (s > 0.0) {
      if (!is_subset(w.pools[i], eco.regions()[i])) fail(ErrorCode::invalid_argument, "pool leaves its block");
      double pm = mu(w.pools[i]);
      if (s > pm * (1.0 + 1e-12)) {
        v.status = Status::fail;
        v.detail = "coalition mass exceeds its pool in block " + std::to_string(i);
        return v;
      }
      if (s >= pm * (1.0 - 1e-12)) {
        part = w.pools[i];
      } else if (mu.semiconvex_constructive()) {
        part = split(mu, w.pools[i], s / pm);
      } else if (w.pools[i].is_atoms()) {
        auto found = atomic_subset_with_mass(mu, w.pools[i], s);
        if (!found) {
          v.status = Status::inconclusive;
          v.detail = "block " + std::to_string(i) + " has no subset of the requested mass";
          return v;
        }
        part = *found;
      } else {
        v.status = Status::inconclusive;
        v.detail = "cannot realize the coalition on this capacity";
        return v;
      }
    }
    parts.push_back(part);
    s_all = s_all | part;
  }
  v.value("mu(S)", mu(s_all));
  v.witness.emplace_back("S", s_all);
  if (!(mu(s_all) > 0.0)) {
    v.status = Status::fail;
    v.detail = "coalition has zero capacity";
    return v;
  }
  // Strict preference on every positive-mass piece of f inside the coalition.
  for (std::size_t i = 0; i < r; ++i) {
    if (parts[i].empty()) continue;
    for (const auto& pc : f.completed()) {
      Region cell = pc.region & parts[i];
      if (cell.empty() || !(mu(cell) > 0.0)) continue;
      if (!eco.blocks()[i].preference.prefers(w.bundles[i], pc.value)) {
        v.status = Status::fail;
        v.detail = "block " + std::to_string(i) + " does not strictly prefer " + fmt(w.bundles[i]) + " to " +
                   fmt(pc.value);
        return v;
      }
    }
  }
  // Resource identity recomputed from integrals over the realized coalition.
  std::vector<Region> cells;
  std::vector<Vector> vals;
  for (std::size_t i = 0; i < r; ++i) {
    if (parts[i].empty()) continue;
    cells.push_back(parts[i]);
    vals.push_back(w.bundles[i]);
  }
  Allocation g = Allocation::block_constant(cells, vals);
  Allocation e = eco.endowment();
  std::vector<Region> checks;
  if (as == ImprovementMode::weak) {
    checks.push_back(s_all);
  } else {
    for (const auto& p : parts) {
      if (!p.empty()) checks.push_back(p);
    }
  }
  double worst = 0.0;
  for (const auto& c : checks) {
    Vector lhs = vector_integral(mu, g, c);
    Vector rhs = vector_integral(mu, e, c);
    for (std::size_t j = 0; j < lhs.size(); ++j) {
      double d = std::abs(lhs[j] - rhs[j]) / (1.0 + std::abs(rhs[j]));
      worst = std::max(worst, d);
    }
  }
  v.value("balance_error", worst);
  if (worst > 1e-8) {
    v.status = Status::fail;
    v.detail = "improving bundles are not resource-balanced on the coalition";
    return v;
  }
  v.detail = as == ImprovementMode::weak ? "coalition improves with balanced total"
                                         : "coalition improves with every block balanced";
  return v;
}

Verdict core_check_simple(const Economy& eco, const Allocation& f) {
  for (const auto& b : eco.blocks()) {
    if (!b.preference.has_utility()) fail(ErrorCode::precondition, "core_check_simple needs utility preferences");
  }
  auto w = eco.bundles(f);
  Verdict v = feasibility(eco, f);
  if (!v.passed()) {
    v.detail = "allocation is not feasible: " + v.detail;
    return v;
  }
  v = Verdict{};
  bool equality = false, below = false;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < eco.size(); ++i) {
    const auto& pref = eco.blocks()[i].preference;
    double uw = pref.utility(w[i]);
    double ue = pref.utility(eco.blocks()[i].endowment);
    v.value("u_" + std::to_string(i) + "(w)", uw);
    v.value("u_" + std::to_string(i) + "(e)", ue);
    double tol = verify_tol * (1.0 + std::abs(ue));
    if (std::abs(uw - ue) <= tol) equality = true;
    else if (uw < ue && !below) {
      below = true;
      bad = i;
    }
  }
  if (below) {
    v.status = Status::fail;
    v.detail = "block " + std::to_string(bad) + " is worse off than with its endowment";
    v.witness.emplace_back("E_" + std::to_string(bad), eco.regions()[bad]);
  } else if (!equality) {
    v.status = Status::fail;
    v.detail = "every block is strictly better off than with its endowment";
    v.witness.emplace_back("X", Region::full(eco.capacity().universe()));
  } else {
    v.detail = "no block below its endowment utility and at least one at it";
  }
  return v;
}

// ---- Walras certificate from the large core ----

LcWalrasResult lc_to_walras(const Economy& eco, const Allocation& f, int grid) {
  LcWalrasResult out;
  out.strong_check = improvement_oracle(eco, f, ImprovementMode::strong, grid);
  if (out.strong_check.improved) {
    out.status = Status::fail;
    out.detail = "allocation is strongly improvable, so it is not in the large core";
    return out;
  }
  auto w = eco.bundles(f);
  const std::size_t n = eco.dim();
  std::vector<ConeTerm> terms;
  for (std::size_t i = 0; i < eco.size(); ++i) {
    const auto& b = eco.blocks()[i];
    terms.push_back({eco.capacity()(eco.regions()[i]), b.endowment, upper_set(b.preference, w[i], 0.0)});
  }
  ConeSum cone(n, std::move(terms));
  out.separation = separation_price(cone);
  if (!out.separation.has_price) {
    out.status = Status::fail;
    out.detail = "no supporting price; the gap cone meets the negative orthant at " + fmt(out.separation.witness) +
                 " (oracle resolution may be insufficient)";
    return out;
  }
  out.price = out.separation.price;

  // A common supergradient at the bundles is the natural price when it also
  // supports the whole cone; it is exact where sampling only brackets it.
  std::optional<Vector> common;
  for (std::size_t i = 0; i < eco.size(); ++i) {
    auto g = eco.blocks()[i].preference.supporting_price(w[i]);
    if (!g || (common && max_abs_diff(*common, *g) > 1e-9)) {
      common.reset();
      break;
    }
    if (!common) common = g;
  }
  if (common) {
    double slack = std::numeric_limits<double>::infinity();
    for (const auto& d : cone.directions()) slack = std::min(slack, dot(*common, d));
    if (slack >= -1e-12) {
      out.price = *common;
      out.price_from_gradient = true;
    }
  }

  out.gamma = gamma_check(cone, out.price);
  std::vector<std::string> problems;
  if (!out.gamma.all_zero()) problems.push_back("gamma is not identically zero at the price");
  for (std::size_t i = 0; i < eco.size(); ++i) {
    double gap = dot(out.price, w[i]) - dot(out.price, eco.blocks()[i].endowment);
    out.value_gap.push_back(gap);
    if (std::abs(gap) > verify_tol) {
      problems.push_back("block " + std::to_string(i) + " value p.f differs from p.e by " + std::to_string(gap));
    }
  }
  out.certificate = walras_check(eco, f, out.price);
  if (!out.certificate.passed()) problems.push_back(out.certificate.detail);
  out.status = problems.empty() ? Status::pass : Status::fail;
  for (std::size_t k = 0; k < problems.size(); ++k) out.detail += (k ? "; " : "") + problems[k];
  if (out.detail.empty()) out.detail = "price " + fmt(out.price) + " certifies the allocation";
  return out;
}

// ---- core of a common span-linear utility ----

namespace {

// The n = 2, r = 2 Cobb-Douglas system: w1 on the level curve of u(e1)
// parametrized by its first coordinate, w2 = (E - m1 w1) / m2. h <= 0 with
// zeros exactly at solutions, so solutions are located as maxima of h.
std::vector<std::vector<Vector>> solve_two_by_two(const Preference& pref, const std::vector<EconomyBlock>& blocks,
                                                  const Vector& aggregate) {
  const double a = pref.parameters()[0];
  const double m1 = blocks[0].mass, m2 = blocks[1].mass;
  const double u1 = pref.utility(blocks[0].endowment), u2 = pref.utility(blocks[1].endowment);
  auto w1_of = [&](double x) { return Vector{x, std::pow(u1 / std::pow(x, a), 1.0 / (1.0 - a))}; };
  auto h = [&](double x) {
    Vector w1 = w1_of(x);
    Vector w2{(aggregate[0] - m1 * w1[0]) / m2, (aggregate[1] - m1 * w1[1]) / m2};
    if (w2[0] < 0.0 || w2[1] < 0.0) return -std::numeric_limits<double>::infinity();
    return pref.utility(w2) - u2;
  };
  const double hi = aggregate[0] / m1;
  const int steps = 4000;
  std::vector<double> xs(steps + 1), hs(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    xs[k] = hi * std::pow(1e-9, 1.0 - static_cast<double>(k) / steps);
    hs[k] = h(xs[k]);
  }
  std::vector<std::vector<Vector>> sols;
  for (int k = 1; k < steps; ++k) {
    if (!(hs[k] >= hs[k - 1] && hs[k] >= hs[k + 1]) || !std::isfinite(hs[k])) continue;
    double lo = xs[k - 1], up = xs[k + 1];
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
      double c = up - phi * (up - lo), d = lo + phi * (up - lo);
      if (h(c) >= h(d)) up = d;
      else lo = c;
    }
    double x = 0.5 * (lo + up);
    if (std::abs(h(x)) > 1e-9 * (1.0 + u2)) continue;
    Vector w1 = w1_of(x);
    Vector w2{(aggregate[0] - m1 * w1[0]) / m2, (aggregate[1] - m1 * w1[1]) / m2};
    bool dup = false;
    for (const auto& s : sols) dup = dup || max_abs_diff(s[0], w1) <= 1e-4 * (1.0 + w1[0]);
    if (!dup) sols.push_back({w1, w2});
  }
  return sols;
}

}  // namespace

CoreCharacterization characterize_core(const Economy& eco, std::uint64_t seed) {
  const auto& blocks = eco.blocks();
  const Preference& pref = blocks.front().preference;
  for (const auto& b : blocks) {
    if (!b.preference.has_utility()) fail(ErrorCode::precondition, "characterize_core needs a utility");
    if (!(b.preference == pref)) fail(ErrorCode::precondition, "characterize_core needs a common utility");
  }
  const std::size_t r = eco.size(), n = eco.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Joint linearity of u on the cone spanned by the endowments.
  std::vector<double> ue(r);
  for (std::size_t i = 0; i < r; ++i) ue[i] = pref.utility(blocks[i].endowment);
  for (int t = 0; t < 64; ++t) {
    Vector lam(r);
    for (auto& l : lam) l = t < static_cast<int>(r) ? 0.0 : 2.0 * unit(rng);
    if (t < static_cast<int>(r)) lam[t] = 1.0 + t;
    Vector x(n, 0.0);
    double lin = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < n; ++j) x[j] += lam[i] * blocks[i].endowment[j];
      lin += lam[i] * ue[i];
    }
    double ux = pref.utility(x);
    if (std::abs(ux - lin) > 1e-9 * (1.0 + std::abs(lin))) {
      fail(ErrorCode::precondition, "utility is not linear on the endowment span: direction lambda = " + fmt(lam) +
                                        " gives u = " + std::to_string(ux) + " vs " + std::to_string(lin));
    }
  }

  CoreCharacterization out;
  Vector agg(n, 0.0);
  for (const auto& b : blocks) {
    for (std::size_t j = 0; j < n; ++j) agg[j] += b.mass * b.endowment[j];
  }
  // Ray solution w_i = (u(e_i) / u(E)) E.
  double uagg = pref.utility(agg);
  std::vector<Vector> ray(r, Vector(n));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < n; ++j) ray[i][j] = ue[i] / uagg * agg[j];
  }
  out.members.push_back(ray);

  std::ostringstream desc;
  if (pref.kind() == PreferenceKind::cobb_douglas) {
    out.unique = true;
    desc << "core = { w_i = (u(e_i)/u(E)) E }, unique because u is strictly quasi-concave";
    if (n == 2 && r == 2) {
      auto sols = solve_two_by_two(pref, blocks, agg);
      bool match = sols.size() == 1 && max_abs_diff(sols[0][0], ray[0]) <= 1e-4 * (1.0 + ray[0][0]);
      desc << "; the two-commodity solver finds " << sols.size() << " solution(s)"
           << (match ? ", matching it" : ", NOT matching it");
      if (!match) {
        out.status = Status::fail;
        out.unique = false;
      }
    }
  } else {
    // Superadditivity turns u(w_i) = u(e_i) into u(w_i) >= u(e_i): a polytope.
    std::vector<AffinePiece> pieces;
    if (pref.kind() == PreferenceKind::linear) pieces.push_back({pref.parameters(), 0.0});
    else pieces = pref.polyhedral_utility()->pieces();
    const std::size_t vars = r * n;
    for (int t = 0; t < 12; ++t) {
      lp::Program<double> prog(vars);
      for (auto& c : prog.objective) c = unit(rng) - 0.5;
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> row(vars, 0.0);
        for (std::size_t i = 0; i < r; ++i) row[i * n + j] = blocks[i].mass;
        prog.add(std::move(row), lp::Sense::eq, agg[j]);
      }
      for (std::size_t i = 0; i < r; ++i) {
        for (const auto& pc : pieces) {
          std::vector<double> row(vars, 0.0);
          for (std::size_t j = 0; j < n; ++j) row[i * n + j] = pc.slope[j];
          prog.add(std::move(row), lp::Sense::ge, ue[i] - pc.intercept);
        }
      }
      auto sol = lp::solve(prog);
      if (!sol.optimal()) continue;
      std::vector<Vector> m(r, Vector(n));
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < n; ++j) m[i][j] = std::max(sol.x[i * n + j], 0.0);
      }
      bool dup = false;
      for (const auto& other : out.members) {
        double d = 0.0;
        for (std::size_t i = 0; i < r; ++i) d = std::max(d, max_abs_diff(other[i], m[i]));
        dup = dup || d <= 1e-9;
      }
      if (!dup) out.members.push_back(m);
    }
    out.unique = out.members.size() == 1;
    desc << "core = { feasible simple w : u(w_i) = u(e_i) for all i }, a polytope with "
         << out.members.size() << " sampled vertex/ray member(s)";
  }

  LcWalrasResult lw = lc_to_walras(eco, eco.endowment());
  out.price = lw.price;
  if (!(lw.status == Status::pass)) {
    out.status = Status::fail;
    desc << "; no Walras price for the endowment: " << lw.detail;
    out.description = desc.str();
    return out;
  }
  for (const auto& m : out.members) {
    Allocation f = eco.simple(m);
    if (walras_check(eco, f, out.price).passed() && core_check_simple(eco, f).passed()) ++out.members_certified;
  }
  // Feasible perturbations of members that leave the solution set.
  for (int t = 0; t < 32; ++t) {
    const auto& base = out.members[static_cast<std::size_t>(t) % out.members.size()];
    std::vector<Vector> d(r, Vector(n, 0.0));
    for (std::size_t i = 0; i + 1 < r; ++i) {
      for (std::size_t j = 0; j < n; ++j) d[i][j] = unit(rng) - 0.5;
    }
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < r; ++i) s += blocks[i].mass * d[i][j];
      d[r - 1][j] = -s / blocks[r - 1].mass;
    }
    double step = 0.5;
    std::vector<Vector> w = base;
    bool ok = false;
    for (int shrink = 0; shrink < 40 && !ok; ++shrink, step *= 0.5) {
      ok = true;
      for (std::size_t i = 0; i < r && ok; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          w[i][j] = base[i][j] + step * d[i][j];
          if (w[i][j] < 0.0) ok = false;
        }
      }
    }
    if (!ok) continue;
    bool member = true;
    for (std::size_t i = 0; i < r; ++i) {
      member = member && std::abs(pref.utility(w[i]) - ue[i]) <= verify_tol * (1.0 + ue[i]);
    }
    if (member) continue;
    ++out.nonmembers_tested;
    if (!core_check_simple(eco, eco.simple(w)).passed()) ++out.nonmembers_rejected;
  }
  if (out.members_certified != out.members.size() || out.nonmembers_rejected != out.nonmembers_tested) {
    out.status = Status::fail;
  }
  desc << "; Walras price " << fmt(out.price) << "; " << out.members_certified << "/" << out.members.size()
       << " members certified, " << out.nonmembers_rejected << "/" << out.nonmembers_tested
       << " non-members rejected";
  out.description = desc.str();
  return out;
}

}  // namespace choquet
