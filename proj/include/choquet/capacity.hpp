#pragma once

#include "choquet/concave.hpp"
#include "choquet/rational.hpp"
#include "choquet/regions.hpp"
#include "choquet/verdict.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

namespace choquet {

enum class CapacityKind { explicit_table, product_section, partitioned, conjugate };

const char* to_string(CapacityKind k) noexcept;

/// A fuzzy measure: monotone, zero on the empty set, finite total mass.
///
/// Four kinds are supported:
///  - explicit_table: a value for every subset of a finite atom universe (N <= 20),
///    stored exactly as rationals.
///  - product_section: B |-> scale * integral_0^1 gamma(lambda_1(B_y)) dy on rectangle
///    unions, evaluated exactly slab by slab (gamma is only applied at the end).
///  - partitioned: mu(A) = sum_i mu_i(A n E_i) for a fixed block partition E_1..E_r.
///  - conjugate: A |-> mu(X) - mu(X \ A).
///
/// Capacities are immutable handles; copies share state.
class Capacity {
 public:
  static constexpr int max_explicit_atoms = 20;

  /// Table indexed by subset bitmask. Throws Error(invalid_argument) unless the
  /// table has 2^n nonnegative monotone entries with table[0] == 0.
  static Capacity explicit_table(int n, std::vector<Rational> table);
  /// Additive measure with the given atom weights.
  static Capacity additive(const std::vector<Rational>& weights);
  static Capacity product_section(ConcaveFunction gamma = ConcaveFunction::sqrt(), double scale = 1.0);
  /// Blocks must be pairwise disjoint and cover the universe.
  static Capacity partitioned(std::vector<Region> blocks, std::vector<Capacity> parts);

  Capacity conjugate() const;

  CapacityKind kind() const;
  Universe universe() const;
  double operator()(const Region& a) const;
  double total_mass() const;

  /// Value as an exact rational when every ingredient is a rational table.
  std::optional<Rational> exact(const Region& a) const;

  /// True when y-cuts A n ([0,1) x [0,tau)) give a continuous, additive family,
  /// which is what split() relies on.
  bool semiconvex_constructive() const;

  /// Declared (not computed) continuity from below, carried from descriptors.
  bool declared_continuous_from_below() const;
  Capacity with_declared_continuity(bool flag) const;

  // Kind-specific accessors; each throws Error(invalid_argument) on the wrong kind.
  int atoms() const;
  const std::vector<Rational>& table() const;
  const ConcaveFunction& gamma() const;
  double scale() const;
  const std::vector<Region>& blocks() const;
  const std::vector<Capacity>& parts() const;
  const Capacity& base() const;

  struct Data;

 private:
  explicit Capacity(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

inline double evaluate(const Capacity& mu, const Region& a) { return mu(a); }
inline Capacity conjugate(const Capacity& mu) { return mu.conjugate(); }

/// A set function viewed through the property checkers. exact may be empty.
struct SetFunction {
  Universe universe;
  std::function<double(const Region&)> value;
  std::function<std::optional<Rational>(const Region&)> exact;
};

SetFunction as_set_function(const Capacity& mu);

enum class Property { monotone, subadditive, submodular, zero_sets_union_stable };

const char* to_string(Property p) noexcept;

struct CheckOptions {
  std::uint64_t seed = 20240601;
  std::size_t samples = 1000;
  /// Absolute tolerance for floating comparisons; finite exact tables compare exactly.
  double tol = 1e-9;
};

/// Finite universes are checked exhaustively; the unit square by seeded sampling
/// of rectangle-union pairs. A FAIL verdict names the violating pair (A, B).
Verdict check_property(const SetFunction& mu, Property prop, const CheckOptions& opts = {});
inline Verdict check_property(const Capacity& mu, Property prop, const CheckOptions& opts = {}) {
  return check_property(as_set_function(mu), prop, opts);
}

/// mu(A u N) == mu(A) for every tested A (all subsets on finite universes, the empty
/// set plus sampled rectangle unions on the square).
Verdict is_null_set(const Capacity& mu, const Region& n, const CheckOptions& opts = {});

/// Tolerance on |mu(A_t) - t mu(A)| guaranteed by split and nested_split.
inline constexpr double split_tolerance = 1e-10;

/// A_t = A n ([0,1) x [0,tau)) with tau found by bisection so that mu(A_t) = t mu(A).
/// Throws Error(unsupported_capacity) for non-constructive capacities.
Region split(const Capacity& mu, const Region& a, double t);

/// B_t = A_t u (B \ A)_s with mu(B_t) = t mu(B) and B_t n A == A_t exactly.
Region nested_split(const Capacity& mu, const Region& a, const Region& b, double t, const Region& a_t);

/// d_mu(E, F) = mu(E symmetric-difference F).
double pseudometric(const Capacity& mu, const Region& e, const Region& f);

/// Diagnostic semiconvexity probe for finite capacities: a subset F of E with
/// |mu(F) - mu(E)/2| <= tol and |mu(E \ F) - mu(E)/2| <= tol, if one exists.
std::optional<Region> find_half_subset(const Capacity& mu, const Region& e, double tol);

/// Random rectangle union with coordinates on a 1/grid lattice.
RectUnion random_rect_union(std::mt19937_64& rng, int max_rects = 3, int grid = 16);
/// Random region in the given universe (uniform subset for atoms).
Region random_region(std::mt19937_64& rng, const Universe& u, int max_rects = 3, int grid = 16);

}  // namespace choquet
