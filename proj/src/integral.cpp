#include "choquet/integral.hpp"

#include "choquet/error.hpp"
#include "choquet/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace choquet {

namespace {

void require_universe(const Universe& u, const Region& r) {
  if (!(r.universe() == u)) {
    fail(ErrorCode::universe_mismatch, "region over " + describe(r.universe()) + " used with " + describe(u));
  }
}

template <class P>
Region covered(const Universe& u, const std::vector<P>& pieces) {
  Region all = Region::empty(u);
  for (const auto& p : pieces) all = all | p.region;
  return all;
}

template <class P>
std::vector<P> disjoint_nonempty(const Universe& u, std::vector<P> pieces) {
  std::vector<P> kept;
  Region seen = Region::empty(u);
  for (auto& p : pieces) {
    require_universe(u, p.region);
    if (p.region.empty()) continue;
    if (!(seen & p.region).empty()) fail(ErrorCode::invalid_argument, "step function pieces overlap");
    seen = seen | p.region;
    kept.push_back(std::move(p));
  }
  return kept;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * (1.0 + std::max(std::abs(a), std::abs(b))); }

std::vector<Region> block_list(const Capacity& mu, const char* who) {
  if (mu.kind() != CapacityKind::partitioned) {
    fail(ErrorCode::precondition, std::string(who) + " needs a partitioned capacity");
  }
  return mu.blocks();
}

}  // namespace

// ----------------------------------------------------------------- StepFunction

StepFunction::StepFunction(Universe u, std::vector<Piece> pieces)
    : universe_(u), pieces_(disjoint_nonempty(u, std::move(pieces))) {
  for (const auto& p : pieces_) {
    if (!std::isfinite(p.value)) fail(ErrorCode::invalid_argument, "step function values must be finite");
  }
}

StepFunction StepFunction::constant(const Universe& u, double c) { return StepFunction(u, {{Region::full(u), c}}); }

StepFunction StepFunction::indicator(const Region& a, double c) { return StepFunction(a.universe(), {{a, c}}); }

std::vector<Piece> StepFunction::completed() const {
  std::map<double, Region, std::greater<>> by_value;
  for (const auto& p : pieces_) {
    auto [it, inserted] = by_value.try_emplace(p.value, p.region);
    if (!inserted) it->second = it->second | p.region;
  }
  Region rest = complement(covered(universe_, pieces_));
  if (!rest.empty()) {
    auto [it, inserted] = by_value.try_emplace(0.0, rest);
    if (!inserted) it->second = it->second | rest;
  }
  std::vector<Piece> out;
  out.reserve(by_value.size());
  for (auto& [v, r] : by_value) out.push_back({std::move(r), v});
  return out;
}

double StepFunction::value_at_atom(int atom) const {
  for (const auto& p : pieces_) {
    if (p.region.is_atoms() && p.region.atoms().contains(atom)) return p.value;
  }
  return 0.0;
}

double StepFunction::min_value() const {
  auto c = completed();
  return c.empty() ? 0.0 : c.back().value;
}

double StepFunction::max_value() const {
  auto c = completed();
  return c.empty() ? 0.0 : c.front().value;
}

StepFunction StepFunction::restricted(const Region& e) const {
  require_universe(universe_, e);
  std::vector<Piece> out;
  for (const auto& p : pieces_) {
    Region r = p.region & e;
    if (!r.empty()) out.push_back({std::move(r), p.value});
  }
  return StepFunction(universe_, std::move(out));
}

StepFunction StepFunction::scaled(double c) const {
  auto out = pieces_;
  for (auto& p : out) p.value *= c;
  return StepFunction(universe_, std::move(out));
}

StepFunction StepFunction::shifted(double c) const {
  return map([c](double v) { return v + c; });
}

StepFunction StepFunction::map(const std::function<double(double)>& fn) const {
  auto out = completed();
  for (auto& p : out) p.value = fn(p.value);
  return StepFunction(universe_, std::move(out));
}

StepFunction StepFunction::combine(const StepFunction& f, const StepFunction& g,
                                   const std::function<double(double, double)>& op) {
  if (!(f.universe_ == g.universe_)) fail(ErrorCode::universe_mismatch, "step functions over different universes");
  std::vector<Piece> out;
  for (const auto& p : f.completed()) {
    for (const auto& q : g.completed()) {
      Region r = p.region & q.region;
      if (!r.empty()) out.push_back({std::move(r), op(p.value, q.value)});
    }
  }
  return StepFunction(f.universe_, std::move(out));
}

StepFunction operator+(const StepFunction& f, const StepFunction& g) {
  return StepFunction::combine(f, g, [](double a, double b) { return a + b; });
}

// ------------------------------------------------------------------- Allocation

Allocation::Allocation(Universe u, std::size_t dim, std::vector<VectorPiece> pieces)
    : universe_(u), dim_(dim), pieces_(disjoint_nonempty(u, std::move(pieces))) {
  if (dim == 0) fail(ErrorCode::invalid_argument, "allocation needs at least one commodity");
  for (const auto& p : pieces_) {
    if (p.value.size() != dim) fail(ErrorCode::invalid_argument, "allocation value has the wrong dimension");
    for (double v : p.value) {
      if (!(v >= 0.0) || !std::isfinite(v)) fail(ErrorCode::invalid_argument, "allocations must be nonnegative");
    }
  }
}

Allocation Allocation::block_constant(const std::vector<Region>& blocks, const std::vector<Vector>& values) {
  if (blocks.empty() || blocks.size() != values.size()) {
    fail(ErrorCode::invalid_argument, "block_constant needs one value per block");
  }
  std::vector<VectorPiece> pieces;
  for (std::size_t i = 0; i < blocks.size(); ++i) pieces.push_back({blocks[i], values[i]});
  return Allocation(blocks.front().universe(), values.front().size(), std::move(pieces));
}

std::vector<VectorPiece> Allocation::completed() const {
  std::map<Vector, Region> by_value;
  for (const auto& p : pieces_) {
    auto [it, inserted] = by_value.try_emplace(p.value, p.region);
    if (!inserted) it->second = it->second | p.region;
  }
  Region rest = complement(covered(universe_, pieces_));
  if (!rest.empty()) {
    Vector zero(dim_, 0.0);
    auto [it, inserted] = by_value.try_emplace(zero, rest);
    if (!inserted) it->second = it->second | rest;
  }
  std::vector<VectorPiece> out;
  for (auto& [v, r] : by_value) out.push_back({std::move(r), v});
  return out;
}

StepFunction Allocation::component(std::size_t j) const {
  if (j >= dim_) fail(ErrorCode::invalid_argument, "commodity index out of range");
  std::vector<Piece> out;
  for (const auto& p : pieces_) out.push_back({p.region, p.value[j]});
  return StepFunction(universe_, std::move(out));
}

StepFunction Allocation::apply(const std::function<double(const Vector&)>& fn) const {
  std::vector<Piece> out;
  for (const auto& p : completed()) out.push_back({p.region, fn(p.value)});
  return StepFunction(universe_, std::move(out));
}

Allocation Allocation::restricted(const Region& e) const {
  require_universe(universe_, e);
  std::vector<VectorPiece> out;
  for (const auto& p : pieces_) {
    Region r = p.region & e;
    if (!r.empty()) out.push_back({std::move(r), p.value});
  }
  return Allocation(universe_, dim_, std::move(out));
}

Allocation Allocation::scaled(double c) const {
  if (c < 0.0) fail(ErrorCode::invalid_argument, "allocations can only be scaled by c >= 0");
  auto out = pieces_;
  for (auto& p : out) {
    for (auto& v : p.value) v *= c;
  }
  return Allocation(universe_, dim_, std::move(out));
}

std::optional<Vector> Allocation::constant_on(const Region& e) const {
  std::optional<Vector> found;
  for (const auto& p : completed()) {
    if ((p.region & e).empty()) continue;
    if (found && *found != p.value) return std::nullopt;
    found = p.value;
  }
  return found;
}

// -------------------------------------------------------------------- integrals

double choquet_integral(const Capacity& mu, const StepFunction& f) {
  if (!(mu.universe() == f.universe())) fail(ErrorCode::universe_mismatch, "integrand and capacity disagree on X");
  auto pieces = f.completed();
  if (!pieces.empty() && pieces.back().value < 0.0) {
    fail(ErrorCode::invalid_argument, "Choquet integral needs a nonnegative integrand; use asymmetric_integral");
  }
  double total = 0.0;
  Region level = Region::empty(f.universe());
  for (std::size_t i = 0; i < pieces.size() && pieces[i].value > 0.0; ++i) {
    level = level | pieces[i].region;
    double next = i + 1 < pieces.size() ? std::max(pieces[i + 1].value, 0.0) : 0.0;
    total += (pieces[i].value - next) * mu(level);
  }
  return total;
}

double choquet_integral(const Capacity& mu, const StepFunction& f, const Region& e) {
  return choquet_integral(mu, f.restricted(e));
}

double asymmetric_integral(const Capacity& mu, const StepFunction& f) {
  if (!(mu.universe() == f.universe())) fail(ErrorCode::universe_mismatch, "integrand and capacity disagree on X");
  auto pieces = f.completed();  // descending
  std::vector<double> levels{0.0};
  for (const auto& p : pieces) levels.push_back(p.value);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const double whole = mu.total_mass();
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const double a = levels[k], b = levels[k + 1];
    // On [a, b) the set {f > t} is {f >= b}.
    Region upper = Region::empty(f.universe());
    for (const auto& p : pieces) {
      if (p.value >= b) upper = upper | p.region;
    }
    double m = mu(upper);
    total += (b - a) * (b <= 0.0 ? m - whole : m);
  }
  return total;
}

Vector vector_integral(const Capacity& mu, const Allocation& f) {
  Vector out(f.dim());
  for (std::size_t j = 0; j < f.dim(); ++j) out[j] = choquet_integral(mu, f.component(j));
  return out;
}

Vector vector_integral(const Capacity& mu, const Allocation& f, const Region& e) {
  return vector_integral(mu, f.restricted(e));
}

// ------------------------------------------------------------------ properties

Verdict conjugate_duality_check(const Capacity& mu, const StepFunction& f) {
  Verdict v;
  double lhs = asymmetric_integral(mu, f.negated());
  double rhs = -asymmetric_integral(mu.conjugate(), f);
  v.value("int(-f) dmu", lhs).value("-int f dconj", rhs);
  if (!close(lhs, rhs, 1e-9)) {
    v.status = Status::fail;
    v.detail = "asymmetric integral of -f differs from minus the conjugate integral of f";
  } else {
    v.detail = "int(-f) dmu = -int f dconj(mu)";
  }
  return v;
}

Verdict subadditivity_check(const Capacity& mu, const StepFunction& f, const StepFunction& g) {
  Verdict v;
  double lhs = choquet_integral(mu, f + g);
  double rhs = choquet_integral(mu, f) + choquet_integral(mu, g);
  v.value("int(f+g)", lhs).value("int f + int g", rhs);
  if (lhs > rhs + closed_form_tol * (1.0 + std::abs(rhs))) {
    v.status = Status::fail;
    v.detail = "int(f+g) > int f + int g";
  } else {
    v.detail = "int(f+g) <= int f + int g";
  }
  return v;
}

Verdict indicator_subadditivity_falsifier(const Capacity& mu, const CheckOptions& opts) {
  Verdict sub = check_property(mu, Property::submodular, opts);
  if (sub.passed()) {
    sub.detail = "no indicator pair violates subadditivity of the integral (" + sub.detail + ")";
    return sub;
  }
  const Region& a = sub.witness.at(0).second;
  const Region& b = sub.witness.at(1).second;
  StepFunction sum = StepFunction::indicator(a) + StepFunction::indicator(b);
  double lhs = choquet_integral(mu, sum);
  double rhs = mu(a) + mu(b);
  Verdict v;
  v.seed = sub.seed;
  v.cases = sub.cases;
  v.witness = sub.witness;
  v.value("int(1_A + 1_B)", lhs).value("mu(A) + mu(B)", rhs);
  if (lhs > rhs + opts.tol) {
    v.status = Status::fail;
    v.detail = "int(1_A + 1_B) > int 1_A + int 1_B";
  } else {
    v.status = Status::inconclusive;
    v.detail = "submodularity witness did not transfer to the integral";
  }
  return v;
}

// ------------------------------------------------------------ indefinite integral

IndefiniteIntegral::IndefiniteIntegral(Capacity mu, StepFunction f) : mu_(std::move(mu)), f_(std::move(f)) {
  if (!(mu_.universe() == f_.universe())) fail(ErrorCode::universe_mismatch, "integrand and capacity disagree on X");
  if (!f_.nonnegative()) fail(ErrorCode::invalid_argument, "indefinite integral needs a nonnegative integrand");
}

SetFunction IndefiniteIntegral::as_set_function() const {
  IndefiniteIntegral self = *this;
  return {mu_.universe(), [self](const Region& e) { return self(e); }, {}};
}

std::vector<InheritanceLine> IndefiniteIntegral::inheritance_report(const CheckOptions& opts) const {
  std::vector<InheritanceLine> out;
  SetFunction derived = as_set_function();
  for (Property p : {Property::subadditive, Property::submodular, Property::zero_sets_union_stable}) {
    InheritanceLine line{p, check_property(mu_, p, opts).passed(), {}};
    if (line.base_holds) {
      line.derived = check_property(derived, p, opts);
    } else {
      line.derived.status = Status::inconclusive;
      line.derived.detail = std::string("base capacity is not ") + to_string(p);
    }
    out.push_back(std::move(line));
  }
  return out;
}

// ---------------------------------------------------------- absolute continuity

double abs_continuity_modulus(const StepFunction& f, double eps) {
  if (!(eps > 0.0)) fail(ErrorCode::domain, "epsilon must be positive");
  double a = f.max_value();
  if (a <= 0.0) return std::numeric_limits<double>::infinity();
  return eps / (2.0 * a);
}

Verdict abs_continuity_check(const Capacity& mu, const StepFunction& f, double eps, const CheckOptions& opts) {
  const double delta = abs_continuity_modulus(f, eps);
  Verdict v;
  v.value("delta", delta);
  auto test = [&](const Region& e) {
    double m = mu(e);
    if (!(m < delta)) return true;
    ++v.cases;
    double mf = choquet_integral(mu, f, e);
    if (mf < eps) return true;
    v.status = Status::fail;
    v.detail = "mu(E) < delta but mu_f(E) >= eps";
    v.witness = {{"E", e}};
    v.value("mu(E)", m).value("mu_f(E)", mf);
    return false;
  };
  const Universe u = mu.universe();
  if (u.kind == Universe::Kind::atoms && u.atoms <= 16) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << u.atoms); ++mask) {
      if (!test(Region(AtomSet(u.atoms, mask)))) return v;
    }
    v.detail = "all subsets with mu(E) < delta";
    return v;
  }
  std::mt19937_64 rng(opts.seed);
  v.seed = opts.seed;
  for (std::size_t s = 0; s < opts.samples; ++s) {
    if (!test(random_region(rng, u, 2, 64))) return v;
  }
  v.detail = "sampled sets with mu(E) < delta";
  return v;
}

// ------------------------------------------------------------------ comparisons

namespace {

/// Common refinement cells of two step functions with both values.
struct Cell {
  Region region;
  double f, g;
};

std::vector<Cell> refine(const StepFunction& f, const StepFunction& g) {
  std::vector<Cell> cells;
  for (const auto& p : f.completed()) {
    for (const auto& q : g.completed()) {
      Region r = p.region & q.region;
      if (!r.empty()) cells.push_back({std::move(r), p.value, q.value});
    }
  }
  return cells;
}

}  // namespace

Verdict compare_pointwise_from_integrals(const Capacity& mu, const StepFunction& f, const StepFunction& g,
                                         Comparison mode, const CheckOptions& opts) {
  const Universe u = mu.universe();
  IndefiniteIntegral mf(mu, f), mg(mu, g);
  Verdict v;
  auto test = [&](const Region& e) {
    ++v.cases;
    double a = mf(e), b = mg(e);
    bool bad = a > b + opts.tol || (mode == Comparison::equal && b > a + opts.tol);
    if (!bad) return true;
    v.status = Status::fail;
    v.detail = mode == Comparison::equal ? "mu_f(E) != mu_g(E)" : "mu_f(E) > mu_g(E)";
    v.witness = {{"E", e}};
    v.value("mu_f(E)", a).value("mu_g(E)", b);
    return false;
  };

  auto cells = refine(f, g);
  if (u.kind == Universe::Kind::atoms && u.atoms <= 16) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << u.atoms); ++mask) {
      if (!test(Region(AtomSet(u.atoms, mask)))) return v;
    }
    v.detail = "all subsets tested";
  } else if (cells.size() <= 12) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cells.size()); ++mask) {
      Region e = Region::empty(u);
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if ((mask >> k) & 1U) e = e | cells[k].region;
      }
      if (!test(e)) return v;
    }
    v.detail = "all unions of refinement cells tested";
  } else {
    std::mt19937_64 rng(opts.seed);
    v.seed = opts.seed;
    std::bernoulli_distribution coin(0.5);
    for (std::size_t s = 0; s < opts.samples; ++s) {
      Region e = Region::empty(u);
      for (const auto& c : cells) {
        if (coin(rng)) e = e | c.region;
      }
      if (!test(e)) return v;
    }
    v.detail = "sampled unions of refinement cells";
  }

  Region exceptional = Region::empty(u);
  for (const auto& c : cells) {
    if (c.f > c.g || (mode == Comparison::equal && c.f != c.g)) exceptional = exceptional | c.region;
  }
  Verdict null = is_null_set(mu, exceptional, opts);
  if (!null.passed()) {
    v.status = Status::inconclusive;
    v.detail = "integrals compare but the exceptional set is not null; capacity hypotheses fail";
    v.witness = {{"N", exceptional}};
    return v;
  }
  v.detail += mode == Comparison::equal ? "; f = g off a null set" : "; f <= g off a null set";
  v.witness = {{"N", exceptional}};
  return v;
}

Verdict strict_inequality(const Capacity& mu, const StepFunction& f, const StepFunction& g, const Region& s) {
  Verdict v;
  v.status = Status::inconclusive;
  const double ms = mu(s);
  if (!(ms > 0.0)) {
    v.detail = "mu(S) = 0";
    return v;
  }
  for (const auto& c : refine(f, g)) {
    if ((c.region & s).empty()) continue;
    if (!(c.f > c.g)) {
      v.detail = "f > g fails somewhere on S";
      v.witness = {{"cell", c.region & s}};
      return v;
    }
  }
  std::vector<Region> blocks =
      mu.kind() == CapacityKind::partitioned ? mu.blocks() : std::vector<Region>{Region::full(mu.universe())};
  for (const auto& b : blocks) {
    std::optional<double> level;
    for (const auto& p : g.completed()) {
      if ((p.region & b).empty()) continue;
      if (level && *level != p.value) {
        v.detail = "g is not constant on a block";
        return v;
      }
      level = p.value;
    }
  }
  double a = choquet_integral(mu, f, s), b = choquet_integral(mu, g, s);
  v.value("mu_f(S)", a).value("mu_g(S)", b).value("gap", a - b);
  v.status = a > b ? Status::pass : Status::fail;
  v.detail = a > b ? "mu_f(S) > mu_g(S)" : "strict inequality lost";
  return v;
}

std::optional<Region> find_smaller_witness(const Capacity& mu, const StepFunction& f, double c, const Region& s) {
  Region out = Region::empty(mu.universe());
  for (const auto& p : f.completed()) {
    if (p.value < c) out = out | (p.region & s);
  }
  if (mu(out) > 0.0) return out;
  return std::nullopt;
}

Verdict block_additivity_check(const Capacity& mu, const Allocation& g, const Region& a, const Vector& price) {
  auto blocks = block_list(mu, "block_additivity_check");
  if (price.size() != g.dim()) fail(ErrorCode::invalid_argument, "price has the wrong dimension");
  Verdict v;
  Vector lhs = vector_integral(mu, g, a);
  Vector rhs(g.dim(), 0.0);
  for (const auto& b : blocks) {
    Vector part = vector_integral(mu, g, a & b);
    for (std::size_t j = 0; j < rhs.size(); ++j) rhs[j] += part[j];
  }
  for (std::size_t j = 0; j < lhs.size(); ++j) {
    v.value("mu_g(A)[" + std::to_string(j) + "]", lhs[j]);
    if (!close(lhs[j], rhs[j], closed_form_tol)) {
      v.status = Status::fail;
      v.detail = "mu_g(A) differs from the blockwise sum in component " + std::to_string(j);
      return v;
    }
  }
  bool block_constant = std::all_of(blocks.begin(), blocks.end(), [&](const Region& b) {
    return g.constant_on(b).has_value();
  });
  if (block_constant) {
    double pg = choquet_integral(mu, g.apply([&](const Vector& x) { return dot(price, x); }));
    double pmu = dot(price, vector_integral(mu, g));
    v.value("mu_{p.g}(X)", pg).value("p.mu_g(X)", pmu);
    if (!close(pg, pmu, closed_form_tol)) {
      v.status = Status::fail;
      v.detail = "mu_{p.g}(X) != p . mu_g(X) for block-constant g";
      return v;
    }
    v.detail = "blockwise additivity and price linearity hold";
  } else {
    v.detail = "blockwise additivity holds (g not block-constant, price identity skipped)";
  }
  return v;
}

Vector mean_value(const Capacity& mu, const Allocation& s, const Region& a, std::size_t block) {
  auto blocks = block_list(mu, "mean_value");
  if (block >= blocks.size()) fail(ErrorCode::invalid_argument, "block index out of range");
  Region part = a & blocks[block];
  double m = mu(part);
  if (!(m > 0.0)) fail(ErrorCode::division, "mean value over a block part of zero capacity");
  Vector w = vector_integral(mu, s, part);
  for (auto& x : w) x /= m;
  return w;
}

Allocation simplify_selection(const Capacity& mu, const Allocation& s, const Region& a) {
  auto blocks = block_list(mu, "simplify_selection");
  std::vector<VectorPiece> pieces;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (mu(a & blocks[i]) > 0.0) {
      pieces.push_back({blocks[i], mean_value(mu, s, a, i)});
    } else {
      Allocation rest = s.restricted(blocks[i]);
      for (const auto& p : rest.pieces()) pieces.push_back(p);
    }
  }
  return Allocation(s.universe(), s.dim(), std::move(pieces));
}

// ---------------------------------------------------------------------- Jensen

Verdict jensen_scalar(const Capacity& mu, const StepFunction& f, const ConcaveFunction& u) {
  const double m = mu.total_mass();
  if (!(m > 0.0)) fail(ErrorCode::precondition, "Jensen needs mu(X) > 0");
  if (!f.nonnegative()) fail(ErrorCode::invalid_argument, "Jensen needs a nonnegative integrand");
  const double top = std::max(1.0, f.max_value());
  double prev = u(0.0);
  for (int k = 1; k <= 256; ++k) {
    double cur = u(top * k / 256.0);
    if (cur < prev - 1e-15 * (1.0 + std::abs(prev))) fail(ErrorCode::precondition, "u is not monotone on the range of f");
    prev = cur;
  }
  double lhs = u(choquet_integral(mu, f) / m);
  double rhs = asymmetric_integral(mu, f.map([&](double x) { return u(x); })) / m;
  Verdict v;
  v.value("u(int f)", lhs).value("int u(f)", rhs).value("normalization", m);
  if (lhs < rhs - closed_form_tol * (1.0 + std::abs(rhs))) {
    v.status = Status::fail;
    v.detail = "u(int f) < int u(f)";
  } else {
    v.detail = m == 1.0 ? "u(int f) >= int u(f)" : "u(int f) >= int u(f) after normalizing mu(X) to 1";
  }
  return v;
}

Verdict jensen_vector(const Capacity& mu, const Allocation& f, const PolyhedralUtility& u) {
  if (u.dim() != f.dim()) fail(ErrorCode::invalid_argument, "utility and allocation dimensions differ");
  const auto& pieces = u.pieces();
  const std::size_t n = u.dim();
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    // Is there t >= 0 where piece k is the minimum?
    lp::Program<double> prog(n);
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      if (j == k) continue;
      std::vector<double> row(n);
      for (std::size_t c = 0; c < n; ++c) row[c] = pieces[k].slope[c] - pieces[j].slope[c];
      prog.add(row, lp::Sense::le, pieces[j].intercept - pieces[k].intercept);
    }
    if (!lp::solve(prog).optimal()) {
      fail(ErrorCode::malformed_utility, "affine piece " + std::to_string(k) + " never touches the utility");
    }
  }
  const double m = mu.total_mass();
  if (!(m > 0.0)) fail(ErrorCode::precondition, "Jensen needs mu(X) > 0");
  Vector mean = vector_integral(mu, f);
  for (auto& x : mean) x /= m;
  double lhs = u(mean);
  double rhs = asymmetric_integral(mu, f.apply([&](const Vector& x) { return u(x); })) / m;
  Verdict v;
  v.value("u(int f)", lhs).value("int u(f)", rhs).value("normalization", m);
  if (lhs < rhs - closed_form_tol * (1.0 + std::abs(rhs))) {
    v.status = Status::fail;
    v.detail = "u(int f) < int u(f)";
  } else {
    v.detail = "u(int f) >= int u(f)";
  }
  return v;
}

}  // namespace choquet
