#pragma once

#include "choquet/capacity.hpp"
#include "choquet/concave.hpp"
#include "choquet/vector.hpp"
#include "choquet/verdict.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace choquet {

struct Piece {
  Region region;
  double value = 0.0;
};

/// Finite-valued function constant on finitely many disjoint regions; zero on
/// whatever the pieces leave uncovered.
class StepFunction {
 public:
  /// Throws Error(invalid_argument) when pieces overlap and
  /// Error(universe_mismatch) when they mix universes.
  StepFunction(Universe u, std::vector<Piece> pieces);

  static StepFunction constant(const Universe& u, double c);
  static StepFunction indicator(const Region& a, double c = 1.0);

  const Universe& universe() const { return universe_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  /// Pieces covering X (the uncovered remainder appears with value 0), merged
  /// by value and sorted by descending value.
  std::vector<Piece> completed() const;
  double value_at_atom(int atom) const;
  double min_value() const;
  double max_value() const;
  bool nonnegative() const { return min_value() >= 0.0; }

  /// f * 1_E.
  StepFunction restricted(const Region& e) const;
  StepFunction scaled(double c) const;
  StepFunction shifted(double c) const;
  StepFunction negated() const { return scaled(-1.0); }
  StepFunction map(const std::function<double(double)>& fn) const;

  /// Pointwise combination over the common refinement.
  static StepFunction combine(const StepFunction& f, const StepFunction& g,
                              const std::function<double(double, double)>& op);

 private:
  Universe universe_;
  std::vector<Piece> pieces_;
};

StepFunction operator+(const StepFunction& f, const StepFunction& g);

struct VectorPiece {
  Region region;
  Vector value;
};

/// Vector-valued step function with nonnegative components.
class Allocation {
 public:
  Allocation(Universe u, std::size_t dim, std::vector<VectorPiece> pieces);

  /// Constant vector value on each block; blocks must be disjoint.
  static Allocation block_constant(const std::vector<Region>& blocks, const std::vector<Vector>& values);

  const Universe& universe() const { return universe_; }
  std::size_t dim() const { return dim_; }
  const std::vector<VectorPiece>& pieces() const { return pieces_; }

  /// Pieces covering X; the uncovered remainder gets the zero vector.
  std::vector<VectorPiece> completed() const;
  StepFunction component(std::size_t j) const;
  StepFunction apply(const std::function<double(const Vector&)>& fn) const;
  Allocation restricted(const Region& e) const;
  Allocation scaled(double c) const;

  /// Value on a region fully inside one level set, if there is one.
  std::optional<Vector> constant_on(const Region& e) const;

 private:
  Universe universe_;
  std::size_t dim_;
  std::vector<VectorPiece> pieces_;
};

/// Choquet integral of a nonnegative step function over E (default X):
/// sum_i (x_i - x_{i+1}) mu(S_i n E) with levels sorted descending.
/// Throws Error(invalid_argument) if f takes a negative value.
double choquet_integral(const Capacity& mu, const StepFunction& f);
double choquet_integral(const Capacity& mu, const StepFunction& f, const Region& e);

/// int_0^inf mu(f > t) dt + int_-inf^0 (mu(f > t) - mu(X)) dt for signed f.
double asymmetric_integral(const Capacity& mu, const StepFunction& f);

Vector vector_integral(const Capacity& mu, const Allocation& f);
Vector vector_integral(const Capacity& mu, const Allocation& f, const Region& e);

/// Closed-form comparisons use this slack.
inline constexpr double closed_form_tol = 1e-12;

/// asymmetric(mu, -f) == -asymmetric(conjugate(mu), f).
Verdict conjugate_duality_check(const Capacity& mu, const StepFunction& f);

/// int (f + g) <= int f + int g.
Verdict subadditivity_check(const Capacity& mu, const StepFunction& f, const StepFunction& g);

/// Searches indicator pairs 1_A, 1_B with int (1_A + 1_B) > mu(A) + mu(B); a
/// PASS means none exists (mu is submodular on the tested sets).
Verdict indicator_subadditivity_falsifier(const Capacity& mu, const CheckOptions& opts = {});

struct InheritanceLine {
  Property property;
  bool base_holds = false;
  Verdict derived;
};

/// E |-> int_E f dmu.
class IndefiniteIntegral {
 public:
  IndefiniteIntegral(Capacity mu, StepFunction f);

  double operator()(const Region& e) const { return choquet_integral(mu_, f_, e); }
  const Capacity& base() const { return mu_; }
  const StepFunction& integrand() const { return f_; }
  SetFunction as_set_function() const;

  /// For subadditivity, submodularity and union-stable zero sets: whenever mu
  /// has the property, checks that mu_f has it too.
  std::vector<InheritanceLine> inheritance_report(const CheckOptions& opts = {}) const;

 private:
  Capacity mu_;
  StepFunction f_;
};

inline IndefiniteIntegral indefinite(const Capacity& mu, const StepFunction& f) { return {mu, f}; }

/// delta = eps / (2 max f); +infinity when f == 0.
double abs_continuity_modulus(const StepFunction& f, double eps);
/// Samples sets E with mu(E) < delta and checks mu_f(E) < eps.
Verdict abs_continuity_check(const Capacity& mu, const StepFunction& f, double eps, const CheckOptions& opts = {});

enum class Comparison { less_equal, equal };

/// Decides from integrals over test sets whether f <= g (or f == g) mu-a.e.:
/// FAIL with a witness E when mu_f(E) > mu_g(E); on PASS also confirms that
/// {f > g} is a null set. Test sets are all subsets on finite universes and
/// unions of refinement cells on the square.
Verdict compare_pointwise_from_integrals(const Capacity& mu, const StepFunction& f, const StepFunction& g,
                                         Comparison mode = Comparison::less_equal,
                                         const CheckOptions& opts = {});

/// mu_f(S) > mu_g(S) when f > g on S, mu(S) > 0 and g is block-constant.
/// INCONCLUSIVE when a precondition cannot be verified.
Verdict strict_inequality(const Capacity& mu, const StepFunction& f, const StepFunction& g, const Region& s);

/// S' = S n {f < c}, returned when it has positive capacity.
std::optional<Region> find_smaller_witness(const Capacity& mu, const StepFunction& f, double c, const Region& s);

/// mu_g(A) == sum_i mu_g(A n E_i) componentwise, and for block-constant g also
/// mu_{p.g}(X) == p . mu_g(X).
Verdict block_additivity_check(const Capacity& mu, const Allocation& g, const Region& a, const Vector& price);

/// int_{A n E_i} s dmu / mu(A n E_i). Throws Error(division) on a null block.
Vector mean_value(const Capacity& mu, const Allocation& s, const Region& a, std::size_t block);

/// Replaces s on each block meeting A with positive capacity by its mean value.
Allocation simplify_selection(const Capacity& mu, const Allocation& s, const Region& a);

/// u(int f dnu) >= int u(f) dnu with nu = mu / mu(X).
Verdict jensen_scalar(const Capacity& mu, const StepFunction& f, const ConcaveFunction& u);

/// u(int f_1, ..., int f_n) >= int u(f) for nu = mu / mu(X). Every affine piece
/// of u must touch u somewhere on the orthant; otherwise Error(malformed_utility).
Verdict jensen_vector(const Capacity& mu, const Allocation& f, const PolyhedralUtility& u);

}  // namespace choquet
