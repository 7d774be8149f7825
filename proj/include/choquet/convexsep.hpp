#pragma once

#include "choquet/capacity.hpp"
#include "choquet/integral.hpp"
#include "choquet/rational.hpp"
#include "choquet/vector.hpp"
#include "choquet/verdict.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace choquet {

/// conv(generators) + R^n_+.
struct UpperSet {
  std::vector<Vector> generators;
};

/// [0, mass] * (set - base).
struct ConeTerm {
  double mass = 0.0;
  Vector base;
  UpperSet set;
};

/// Sum of scaled, shifted upper sets: { sum_i t_i (v_i - e_i) : t_i in [0, m_i], v_i in C_i }.
class ConeSum {
 public:
  ConeSum(std::size_t dim, std::vector<ConeTerm> terms);

  std::size_t dim() const { return dim_; }
  const std::vector<ConeTerm>& terms() const { return terms_; }
  /// Every generator difference v - e_i of a term with positive mass.
  std::vector<Vector> directions() const;

 private:
  std::size_t dim_;
  std::vector<ConeTerm> terms_;
};

/// z = sum_i t_i (v_i - e_i) with t_i in [0, m_i], v_i in C_i. Exact when small.
/// PASS values carry the t_i.
Verdict cone_membership(const ConeSum& cone, const Vector& z);

/// Random members z1, z2 and lambda: checks lambda z1 + (1 - lambda) z2 is a member.
Verdict convexity_probe(const ConeSum& cone, int trials, std::uint64_t seed);

struct SeparationResult {
  bool has_price = false;
  Vector price;
  /// Filled when the price was computed in exact arithmetic.
  std::vector<Rational> exact_price;
  /// Nonzero member of the cone in -R^n_+ when no price exists.
  Vector witness;
  /// max over prices of the smallest p . (v - e_i).
  double margin = 0.0;
  bool exact = false;

  /// Smallest p . (v - e_i) over all directions.
  double min_slack(const ConeSum& cone) const;
};

/// Margins above -separation_tolerance count as a price; the price then keeps
/// p . x >= margin on every direction.
inline constexpr double separation_tolerance = 1e-12;

/// A price p >= 0, sum p = 1 with p . x >= 0 on the cone, or a witness that
/// none exists. Exact answers pick the lexicographically smallest price;
/// floating answers pick the one with the largest margin.
SeparationResult separation_price(const ConeSum& cone);

struct GammaReport {
  std::vector<double> gamma;
  std::vector<std::optional<Vector>> violating;
  bool all_zero(double tol = 1e-12) const;
};

/// gamma_i = min(0, min over generators v of p . v - p . e_i).
GammaReport gamma_check(const ConeSum& cone, const Vector& price);

/// Range of A |-> (mu(A), mu_e(A)) for a partitioned capacity and
/// block-constant e: the sum of segments [0, (mu(E_i), mu(E_i) e_i)].
class RangeZonotope {
 public:
  RangeZonotope(Capacity mu, std::vector<Vector> block_values);
  /// Throws Error(precondition) unless e is constant on every block.
  static RangeZonotope from_allocation(const Capacity& mu, const Allocation& e);

  std::size_t dim() const { return 1 + values_.front().size(); }
  const std::vector<Vector>& segments() const { return segments_; }

  /// Segment coefficients s_i in [0, 1] hitting the target within tol (L1).
  std::optional<Vector> coefficients(const Vector& target, double tol = 1e-9) const;
  bool contains(const Vector& target, double tol = 1e-9) const { return coefficients(target, tol).has_value(); }

  /// (mu(A), mu_e(A)).
  Vector image(const Region& a) const;

  /// A region with image equal to the target, built from block splits.
  /// Throws Error(unsupported_capacity) for non-constructive capacities and
  /// Error(precondition) when the target is not in the range.
  Region realize(const Vector& target) const;

 private:
  Capacity mu_;
  std::vector<Vector> values_;
  std::vector<Vector> segments_;
};

}  // namespace choquet
