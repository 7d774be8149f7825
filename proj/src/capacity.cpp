#include "choquet/capacity.hpp"

#include "choquet/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace choquet {

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::pass: return "PASS";
    case Status::fail: return "FAIL";
    case Status::inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

const char* to_string(CapacityKind k) noexcept {
  switch (k) {
    case CapacityKind::explicit_table: return "explicit";
    case CapacityKind::product_section: return "product_section";
    case CapacityKind::partitioned: return "partitioned";
    case CapacityKind::conjugate: return "conjugate";
  }
  return "?";
}

const char* to_string(Property p) noexcept {
  switch (p) {
    case Property::monotone: return "monotone";
    case Property::subadditive: return "subadditive";
    case Property::submodular: return "submodular";
    case Property::zero_sets_union_stable: return "zero_sets_union_stable";
  }
  return "?";
}

struct Capacity::Data {
  CapacityKind kind = CapacityKind::explicit_table;
  Universe universe;
  double total = 0.0;
  bool declared_cfb = false;

  int n = 0;
  std::vector<Rational> table;
  std::vector<double> values;

  std::optional<ConcaveFunction> gamma;
  double scale = 1.0;

  std::vector<Region> blocks;
  std::vector<Capacity> parts;

  std::optional<Capacity> base;
};

namespace {

void require_kind(const Capacity::Data& d, CapacityKind k) {
  if (d.kind != k) {
    fail(ErrorCode::invalid_argument,
         std::string("capacity of kind ") + to_string(d.kind) + " has no " + to_string(k) + " payload");
  }
}

void require_universe(const Universe& expected, const Region& a) {
  if (!(a.universe() == expected)) {
    fail(ErrorCode::universe_mismatch,
         "region over " + describe(a.universe()) + " given to a capacity over " + describe(expected));
  }
}

/// scale * sum over horizontal slabs of height * gamma(section length).
double product_section_value(const RectUnion& b, const ConcaveFunction& gamma, double scale) {
  std::vector<Rational> ys = b.y_breakpoints();
  if (ys.size() < 2) return 0.0;
  std::vector<Rational> len(ys.size() - 1, Rational(0));
  auto index_of = [&](const Rational& y) {
    return static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), y) - ys.begin());
  };
  for (const auto& slab : b.slabs()) {
    Rational width = slab.x1 - slab.x0;
    for (const auto& iv : slab.ys.intervals()) {
      std::size_t hi = index_of(iv.hi);
      for (std::size_t k = index_of(iv.lo); k < hi; ++k) len[k] += width;
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < ys.size(); ++k) {
    if (len[k] == 0) continue;
    total += to_double(ys[k + 1] - ys[k]) * gamma(to_double(len[k]));
  }
  return scale * total;
}

}  // namespace

Capacity Capacity::explicit_table(int n, std::vector<Rational> table) {
  if (n < 1 || n > max_explicit_atoms) {
    fail(ErrorCode::invalid_argument, "explicit capacity needs 1 <= n <= 20 atoms");
  }
  const std::size_t size = std::size_t{1} << n;
  if (table.size() != size) {
    fail(ErrorCode::invalid_argument, "explicit capacity over " + std::to_string(n) + " atoms needs " +
                                          std::to_string(size) + " table entries");
  }
  if (table[0] != 0) fail(ErrorCode::invalid_argument, "explicit capacity must vanish on the empty set");
  auto d = std::make_shared<Data>();
  d->kind = CapacityKind::explicit_table;
  d->universe = Universe::finite(n);
  d->n = n;
  d->values.reserve(size);
  for (const auto& v : table) {
    if (v < 0) fail(ErrorCode::invalid_argument, "explicit capacity has a negative entry");
    d->values.push_back(to_double(v));
  }
  for (std::size_t mask = 0; mask < size; ++mask) {
    for (int i = 0; i < n; ++i) {
      std::size_t bigger = mask | (std::size_t{1} << i);
      if (bigger == mask) continue;
      if (d->values[mask] < d->values[bigger] - 1e-12) continue;
      if (table[mask] > table[bigger]) {
        std::ostringstream os;
        os << "explicit capacity is not monotone: mu(" << mask << ") > mu(" << bigger << ")";
        fail(ErrorCode::invalid_argument, os.str());
      }
    }
  }
  d->table = std::move(table);
  d->total = d->values.back();
  return Capacity(std::move(d));
}

Capacity Capacity::additive(const std::vector<Rational>& weights) {
  const int n = static_cast<int>(weights.size());
  if (n < 1 || n > max_explicit_atoms) fail(ErrorCode::invalid_argument, "additive capacity needs 1..20 atoms");
  std::vector<Rational> table(std::size_t{1} << n);
  for (std::size_t mask = 1; mask < table.size(); ++mask) {
    int low = std::countr_zero(mask);
    table[mask] = table[mask & (mask - 1)] + weights[low];
  }
  return explicit_table(n, std::move(table));
}

Capacity Capacity::product_section(ConcaveFunction gamma, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) fail(ErrorCode::invalid_argument, "product-section scale must be positive");
  if (gamma(0.0) != 0.0) fail(ErrorCode::invalid_argument, "distortion must vanish at zero");
  auto d = std::make_shared<Data>();
  d->kind = CapacityKind::product_section;
  d->universe = Universe::square();
  d->gamma = std::move(gamma);
  d->scale = scale;
  d->total = scale * (*d->gamma)(1.0);
  return Capacity(std::move(d));
}

Capacity Capacity::partitioned(std::vector<Region> blocks, std::vector<Capacity> parts) {
  if (blocks.empty() || blocks.size() != parts.size()) {
    fail(ErrorCode::invalid_argument, "partitioned capacity needs one part per block and at least one block");
  }
  Universe u = blocks.front().universe();
  Region cover = Region::empty(u);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    require_universe(u, blocks[i]);
    if (!(parts[i].universe() == u)) {
      fail(ErrorCode::universe_mismatch, "block capacity " + std::to_string(i) + " lives in another universe");
    }
    if (!(cover & blocks[i]).empty()) {
      fail(ErrorCode::invalid_argument, "partition blocks overlap at block " + std::to_string(i));
    }
    cover = cover | blocks[i];
  }
  if (!(cover == Region::full(u))) fail(ErrorCode::invalid_argument, "partition blocks do not cover the universe");
  auto d = std::make_shared<Data>();
  d->kind = CapacityKind::partitioned;
  d->universe = u;
  for (std::size_t i = 0; i < blocks.size(); ++i) d->total += parts[i](blocks[i]);
  d->blocks = std::move(blocks);
  d->parts = std::move(parts);
  return Capacity(std::move(d));
}

Capacity Capacity::conjugate() const {
  // The conjugate of a conjugate is the original capacity.
  if (d_->kind == CapacityKind::conjugate) return *d_->base;
  auto d = std::make_shared<Data>();
  d->kind = CapacityKind::conjugate;
  d->universe = d_->universe;
  d->total = d_->total;
  d->base = *this;
  return Capacity(std::move(d));
}

CapacityKind Capacity::kind() const { return d_->kind; }
Universe Capacity::universe() const { return d_->universe; }
double Capacity::total_mass() const { return d_->total; }

double Capacity::operator()(const Region& a) const {
  require_universe(d_->universe, a);
  switch (d_->kind) {
    case CapacityKind::explicit_table: return d_->values[a.atoms().mask()];
    case CapacityKind::product_section: return product_section_value(a.rects(), *d_->gamma, d_->scale);
    case CapacityKind::partitioned: {
      double total = 0.0;
      for (std::size_t i = 0; i < d_->blocks.size(); ++i) total += d_->parts[i](a & d_->blocks[i]);
      return total;
    }
    case CapacityKind::conjugate: return d_->total - (*d_->base)(complement(a));
  }
  return 0.0;
}

std::optional<Rational> Capacity::exact(const Region& a) const {
  require_universe(d_->universe, a);
  switch (d_->kind) {
    case CapacityKind::explicit_table: return d_->table[a.atoms().mask()];
    case CapacityKind::product_section: return std::nullopt;
    case CapacityKind::partitioned: {
      Rational total = 0;
      for (std::size_t i = 0; i < d_->blocks.size(); ++i) {
        auto v = d_->parts[i].exact(a & d_->blocks[i]);
        if (!v) return std::nullopt;
        total += *v;
      }
      return total;
    }
    case CapacityKind::conjugate: {
      auto whole = d_->base->exact(Region::full(d_->universe));
      auto rest = d_->base->exact(complement(a));
      if (!whole || !rest) return std::nullopt;
      return *whole - *rest;
    }
  }
  return std::nullopt;
}

bool Capacity::semiconvex_constructive() const {
  switch (d_->kind) {
    case CapacityKind::explicit_table: return false;
    case CapacityKind::product_section: return true;
    case CapacityKind::partitioned:
      return std::all_of(d_->parts.begin(), d_->parts.end(),
                         [](const Capacity& c) { return c.semiconvex_constructive(); });
    case CapacityKind::conjugate: return d_->base->semiconvex_constructive();
  }
  return false;
}

bool Capacity::declared_continuous_from_below() const { return d_->declared_cfb; }

Capacity Capacity::with_declared_continuity(bool flag) const {
  auto d = std::make_shared<Data>(*d_);
  d->declared_cfb = flag;
  return Capacity(std::move(d));
}

int Capacity::atoms() const {
  require_kind(*d_, CapacityKind::explicit_table);
  return d_->n;
}
const std::vector<Rational>& Capacity::table() const {
  require_kind(*d_, CapacityKind::explicit_table);
  return d_->table;
}
const ConcaveFunction& Capacity::gamma() const {
  require_kind(*d_, CapacityKind::product_section);
  return *d_->gamma;
}
double Capacity::scale() const {
  require_kind(*d_, CapacityKind::product_section);
  return d_->scale;
}
const std::vector<Region>& Capacity::blocks() const {
  require_kind(*d_, CapacityKind::partitioned);
  return d_->blocks;
}
const std::vector<Capacity>& Capacity::parts() const {
  require_kind(*d_, CapacityKind::partitioned);
  return d_->parts;
}
const Capacity& Capacity::base() const {
  require_kind(*d_, CapacityKind::conjugate);
  return *d_->base;
}

SetFunction as_set_function(const Capacity& mu) {
  return {mu.universe(), [mu](const Region& a) { return mu(a); },
          [mu](const Region& a) { return mu.exact(a); }};
}

// ------------------------------------------------------------ random regions

RectUnion random_rect_union(std::mt19937_64& rng, int max_rects, int grid) {
  std::uniform_int_distribution<int> count(1, std::max(1, max_rects));
  std::uniform_int_distribution<int> coord(0, grid);
  std::vector<Rect> rects;
  int k = count(rng);
  for (int i = 0; i < k; ++i) {
    int a = coord(rng), b = coord(rng), c = coord(rng), e = coord(rng);
    if (a == b) b = (a == grid) ? a - 1 : a + 1;
    if (c == e) e = (c == grid) ? c - 1 : c + 1;
    rects.push_back({Rational(std::min(a, b), grid), Rational(std::max(a, b), grid),
                     Rational(std::min(c, e), grid), Rational(std::max(c, e), grid)});
  }
  return RectUnion::from_rects(rects);
}

Region random_region(std::mt19937_64& rng, const Universe& u, int max_rects, int grid) {
  if (u.kind == Universe::Kind::atoms) {
    std::uniform_int_distribution<std::uint64_t> bits(0, (std::uint64_t{1} << u.atoms) - 1);
    return Region(AtomSet(u.atoms, bits(rng)));
  }
  return Region(random_rect_union(rng, max_rects, grid));
}

// ---------------------------------------------------------- property checks

namespace {

/// Materialized table of a finite set function.
struct FiniteTable {
  int n = 0;
  std::vector<double> v;
  std::vector<Rational> exact;  // empty when unavailable

  Region region(std::uint64_t mask) const { return Region(AtomSet(n, mask)); }
};

FiniteTable materialize(const SetFunction& mu) {
  FiniteTable t;
  t.n = mu.universe.atoms;
  if (t.n > Capacity::max_explicit_atoms) {
    fail(ErrorCode::invalid_argument, "exhaustive checks are limited to 20 atoms");
  }
  const std::uint64_t size = std::uint64_t{1} << t.n;
  t.v.resize(size);
  bool have_exact = static_cast<bool>(mu.exact);
  if (have_exact) t.exact.reserve(size);
  for (std::uint64_t mask = 0; mask < size; ++mask) {
    Region r(AtomSet(t.n, mask));
    t.v[mask] = mu.value(r);
    if (have_exact) {
      auto e = mu.exact(r);
      if (!e) {
        have_exact = false;
        t.exact.clear();
      } else {
        t.exact.push_back(std::move(*e));
      }
    }
  }
  return t;
}

/// lhs(a) + lhs(b) > rhs(c) + rhs(d) beyond tolerance, exact when possible.
bool exceeds(const FiniteTable& t, std::initializer_list<std::uint64_t> lhs,
             std::initializer_list<std::uint64_t> rhs, double tol) {
  double l = 0.0, r = 0.0;
  for (auto m : lhs) l += t.v[m];
  for (auto m : rhs) r += t.v[m];
  if (t.exact.empty()) return l > r + tol;
  if (l < r - 1e-9 * (1.0 + std::abs(r))) return false;
  Rational el = 0, er = 0;
  for (auto m : lhs) el += t.exact[m];
  for (auto m : rhs) er += t.exact[m];
  return el > er;
}

bool is_zero(const FiniteTable& t, std::uint64_t mask, double tol) {
  if (!t.exact.empty()) return t.exact[mask] == 0;
  return std::abs(t.v[mask]) <= tol;
}

Verdict fail_pair(const std::string& what, const Region& a, const Region& b, double lhs, double rhs) {
  Verdict v;
  v.status = Status::fail;
  v.detail = what;
  v.witness = {{"A", a}, {"B", b}};
  v.value("lhs", lhs).value("rhs", rhs);
  return v;
}

Verdict check_finite(const SetFunction& mu, Property prop, const CheckOptions& opts) {
  FiniteTable t = materialize(mu);
  const int n = t.n;
  const std::uint64_t size = std::uint64_t{1} << n;
  Verdict ok;
  ok.detail = "exhaustive over " + std::to_string(size) + " subsets";
  switch (prop) {
    case Property::monotone:
      for (std::uint64_t a = 0; a < size; ++a) {
        for (int i = 0; i < n; ++i) {
          std::uint64_t b = a | (std::uint64_t{1} << i);
          if (b == a) continue;
          ++ok.cases;
          if (exceeds(t, {a}, {b}, opts.tol)) {
            return fail_pair("mu(A) > mu(B) although A is a subset of B", t.region(a), t.region(b), t.v[a], t.v[b]);
          }
        }
      }
      return ok;
    case Property::submodular:
      // Diminishing returns on single atoms is equivalent to submodularity.
      for (std::uint64_t a = 0; a < size; ++a) {
        for (int i = 0; i < n; ++i) {
          if ((a >> i) & 1U) continue;
          for (int j = i + 1; j < n; ++j) {
            if ((a >> j) & 1U) continue;
            std::uint64_t ai = a | (std::uint64_t{1} << i);
            std::uint64_t aj = a | (std::uint64_t{1} << j);
            std::uint64_t aij = ai | aj;
            ++ok.cases;
            if (exceeds(t, {aij, a}, {ai, aj}, opts.tol)) {
              return fail_pair("mu(A u B) + mu(A n B) > mu(A) + mu(B)", t.region(ai), t.region(aj),
                               t.v[aij] + t.v[a], t.v[ai] + t.v[aj]);
            }
          }
        }
      }
      return ok;
    case Property::subadditive: {
      // Disjoint pairs suffice for monotone set functions.
      if (n <= 14) {
        for (std::uint64_t u = 1; u < size; ++u) {
          for (std::uint64_t a = (u - 1) & u; a > 0; a = (a - 1) & u) {
            std::uint64_t b = u & ~a;
            if (a < b) continue;
            ++ok.cases;
            if (exceeds(t, {u}, {a, b}, opts.tol)) {
              return fail_pair("mu(A u B) > mu(A) + mu(B)", t.region(a), t.region(b), t.v[u], t.v[a] + t.v[b]);
            }
          }
        }
        return ok;
      }
      std::mt19937_64 rng(opts.seed);
      std::uniform_int_distribution<std::uint64_t> bits(0, size - 1);
      ok.seed = opts.seed;
      ok.detail = "sampled disjoint pairs (universe too large for 3^n enumeration)";
      for (std::size_t s = 0; s < opts.samples * 100; ++s) {
        std::uint64_t a = bits(rng);
        std::uint64_t b = bits(rng) & ~a;
        ++ok.cases;
        if (exceeds(t, {a | b}, {a, b}, opts.tol)) {
          auto v = fail_pair("mu(A u B) > mu(A) + mu(B)", t.region(a), t.region(b), t.v[a | b], t.v[a] + t.v[b]);
          v.seed = opts.seed;
          return v;
        }
      }
      return ok;
    }
    case Property::zero_sets_union_stable: {
      std::uint64_t zero_union = 0;
      for (std::uint64_t a = 0; a < size; ++a) {
        ++ok.cases;
        if (is_zero(t, a, opts.tol)) zero_union |= a;
      }
      ok.value("zero_union_measure", t.v[zero_union]);
      if (!is_zero(t, zero_union, opts.tol)) {
        Verdict v;
        v.status = Status::fail;
        v.detail = "the union of all zero-measure sets has positive measure";
        v.witness = {{"Z", t.region(zero_union)}};
        v.value("mu(Z)", t.v[zero_union]);
        return v;
      }
      return ok;
    }
  }
  return ok;
}

Verdict check_sampled(const SetFunction& mu, Property prop, const CheckOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  Verdict ok;
  ok.seed = opts.seed;
  ok.detail = "sampled " + std::to_string(opts.samples) + " rectangle-union pairs";
  if (prop == Property::zero_sets_union_stable) {
    Region zero_union = Region::empty(mu.universe);
    for (std::size_t s = 0; s < opts.samples; ++s) {
      Region b = random_region(rng, mu.universe);
      if (s % 7 == 0) b = Region::empty(mu.universe);
      double m = mu.value(b);
      bool null_area = b.is_rects() ? b.rects().area() == 0 : b.empty();
      ++ok.cases;
      if ((std::abs(m) <= opts.tol) != null_area) {
        Verdict v;
        v.status = Status::fail;
        v.seed = opts.seed;
        v.detail = "mu(B) = 0 does not match lambda_2(B) = 0";
        v.witness = {{"B", b}};
        v.value("mu(B)", m);
        return v;
      }
      if (std::abs(m) <= opts.tol) zero_union = zero_union | b;
    }
    if (std::abs(mu.value(zero_union)) > opts.tol) {
      Verdict v;
      v.status = Status::fail;
      v.seed = opts.seed;
      v.detail = "union of sampled zero sets has positive measure";
      v.witness = {{"Z", zero_union}};
      return v;
    }
    return ok;
  }
  for (std::size_t s = 0; s < opts.samples; ++s) {
    Region a = random_region(rng, mu.universe);
    Region b = random_region(rng, mu.universe);
    ++ok.cases;
    Verdict bad;
    bool failed = false;
    switch (prop) {
      case Property::monotone: {
        Region big = a | b;
        double ma = mu.value(a), mb = mu.value(big);
        if (ma > mb + opts.tol) {
          bad = fail_pair("mu(A) > mu(B) although A is a subset of B", a, big, ma, mb);
          failed = true;
        }
        break;
      }
      case Property::subadditive: {
        double l = mu.value(a | b), r = mu.value(a) + mu.value(b);
        if (l > r + opts.tol) {
          bad = fail_pair("mu(A u B) > mu(A) + mu(B)", a, b, l, r);
          failed = true;
        }
        break;
      }
      case Property::submodular: {
        double l = mu.value(a | b) + mu.value(a & b), r = mu.value(a) + mu.value(b);
        if (l > r + opts.tol) {
          bad = fail_pair("mu(A u B) + mu(A n B) > mu(A) + mu(B)", a, b, l, r);
          failed = true;
        }
        break;
      }
      case Property::zero_sets_union_stable: break;
    }
    if (failed) {
      bad.seed = opts.seed;
      return bad;
    }
  }
  return ok;
}

}  // namespace

Verdict check_property(const SetFunction& mu, Property prop, const CheckOptions& opts) {
  Verdict v = mu.universe.kind == Universe::Kind::atoms ? check_finite(mu, prop, opts)
                                                        : check_sampled(mu, prop, opts);
  if (v.detail.empty()) v.detail = to_string(prop);
  return v;
}

Verdict is_null_set(const Capacity& mu, const Region& n, const CheckOptions& opts) {
  require_universe(mu.universe(), n);
  auto compare = [&](const Region& a) -> std::optional<Verdict> {
    bool differs;
    auto ea = mu.exact(a | n);
    auto eb = mu.exact(a);
    double with = mu(a | n), without = mu(a);
    if (ea && eb) {
      differs = *ea != *eb;
    } else {
      differs = std::abs(with - without) > opts.tol;
    }
    if (!differs) return std::nullopt;
    Verdict v;
    v.status = Status::fail;
    v.detail = "mu(A u N) != mu(A)";
    v.witness = {{"A", a}, {"N", n}};
    v.value("mu(A u N)", with).value("mu(A)", without);
    return v;
  };

  Verdict ok;
  if (mu.universe().kind == Universe::Kind::atoms) {
    const int atoms = mu.universe().atoms;
    ok.detail = "exhaustive over all A";
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << atoms); ++mask) {
      ++ok.cases;
      if (auto bad = compare(Region(AtomSet(atoms, mask)))) return *bad;
    }
    return ok;
  }
  std::mt19937_64 rng(opts.seed);
  ok.seed = opts.seed;
  ok.detail = "empty set plus sampled rectangle unions";
  ++ok.cases;
  if (auto bad = compare(Region::empty(mu.universe()))) {
    bad->seed = opts.seed;
    return *bad;
  }
  for (std::size_t s = 0; s < opts.samples; ++s) {
    ++ok.cases;
    if (auto bad = compare(random_region(rng, mu.universe()))) {
      bad->seed = opts.seed;
      return *bad;
    }
  }
  return ok;
}

// -------------------------------------------------------------- splitting

namespace {

void require_constructive(const Capacity& mu, const Region& a) {
  if (!mu.semiconvex_constructive() || !a.is_rects()) {
    fail(ErrorCode::unsupported_capacity,
         std::string("split needs a product-section based capacity, got ") + to_string(mu.kind()));
  }
  require_universe(mu.universe(), a);
}

/// Smallest tau in [0,1] (to 2^-60) with value(tau) >= target, for nondecreasing value.
template <class F>
Rational bisect(F&& value, double target) {
  Rational lo = 0, hi = 1;
  for (int step = 0; step < 60; ++step) {
    Rational mid = (lo + hi) / 2;
    double v = value(mid);
    if (v < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (std::abs(v - target) <= 1e-14 * (1.0 + std::abs(target))) return mid;
  }
  return std::abs(value(lo) - target) <= std::abs(value(hi) - target) ? lo : hi;
}

}  // namespace

Region split(const Capacity& mu, const Region& a, double t) {
  require_constructive(mu, a);
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::domain, "split parameter must lie in [0, 1]");
  if (t == 0.0) return Region::empty(mu.universe());
  if (t == 1.0 || a.empty()) return a;
  const RectUnion& rects = a.rects();
  const double target = t * mu(a);
  Rational tau = bisect([&](const Rational& y) { return mu(Region(rects.below(y))); }, target);
  Region out(rects.below(tau));
  if (std::abs(mu(out) - target) > split_tolerance) {
    fail(ErrorCode::internal_invariant, "split bisection missed its target");
  }
  return out;
}

Region nested_split(const Capacity& mu, const Region& a, const Region& b, double t, const Region& a_t) {
  require_constructive(mu, b);
  if (!is_subset(a, b)) fail(ErrorCode::precondition, "nested_split needs A to be a subset of B");
  if (!is_subset(a_t, a)) fail(ErrorCode::precondition, "nested_split needs A_t to be a subset of A");
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::domain, "split parameter must lie in [0, 1]");
  const RectUnion rest = (b - a).rects();
  const double target = t * mu(b);
  auto family = [&](const Rational& tau) { return a_t | Region(rest.below(tau)); };
  auto value = [&](const Rational& tau) { return mu(family(tau)); };
  const double bracket = 10 * split_tolerance;
  const double low = value(0), high = value(1);
  if (low > target + bracket || high < target - bracket) {
    fail(ErrorCode::internal_invariant, "nested_split: target is outside the bracket [mu(A_t), mu(A_t u (B\\A))]");
  }
  if (std::abs(low - target) <= 1e-14) return a_t;
  if (std::abs(high - target) <= 1e-14) return family(1);
  Region out = family(bisect(value, target));
  if (std::abs(mu(out) - target) > split_tolerance) {
    fail(ErrorCode::internal_invariant, "nested_split bisection missed its target");
  }
  return out;
}

double pseudometric(const Capacity& mu, const Region& e, const Region& f) { return mu(e ^ f); }

std::optional<Region> find_half_subset(const Capacity& mu, const Region& e, double tol) {
  require_universe(mu.universe(), e);
  if (!e.is_atoms()) fail(ErrorCode::invalid_argument, "find_half_subset is a finite-universe diagnostic");
  const double half = mu(e) / 2;
  const std::uint64_t whole = e.atoms().mask();
  const int n = e.atoms().universe_size();
  for (std::uint64_t f = whole;; f = (f - 1) & whole) {
    Region rf(AtomSet(n, f));
    if (std::abs(mu(rf) - half) <= tol && std::abs(mu(e - rf) - half) <= tol) return rf;
    if (f == 0) break;
  }
  return std::nullopt;
}

}  // namespace choquet
