#pragma once

#include "choquet/capacity.hpp"
#include "choquet/concave.hpp"
#include "choquet/convexsep.hpp"
#include "choquet/integral.hpp"
#include "choquet/vector.hpp"
#include "choquet/verdict.hpp"

#include <optional>
#include <string>
#include <vector>

namespace choquet {

enum class PreferenceKind { polyhedral, cobb_douglas, linear, coordinate_list };

const char* to_string(PreferenceKind k) noexcept;

/// Preference of one agent type. Utility kinds compare bundles by u; a
/// coordinate list prefers x to y when x_j > y_j on every listed commodity.
class Preference {
 public:
  static Preference polyhedral(PolyhedralUtility u);
  /// u(x) = prod x_j^alpha_j with alpha in (0,1)^n summing to 1.
  static Preference cobb_douglas(Vector alpha);
  /// u(x) = c . x with c >= 0, c != 0.
  static Preference linear(Vector c);
  /// 0-based commodity indices.
  static Preference coordinate_list(std::vector<int> coords, std::size_t dim);

  PreferenceKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool has_utility() const { return kind_ != PreferenceKind::coordinate_list; }
  /// Positively homogeneous of degree one.
  bool homogeneous() const;

  /// Throws Error(precondition) for coordinate lists.
  double utility(const Vector& x) const;
  bool prefers(const Vector& x, const Vector& y) const;
  /// Normalized supergradient at x when it is unique.
  std::optional<Vector> supporting_price(const Vector& x) const;

  const Vector& parameters() const { return params_; }
  const std::vector<int>& coords() const { return coords_; }
  const std::optional<PolyhedralUtility>& polyhedral_utility() const { return poly_; }

  friend bool operator==(const Preference& a, const Preference& b);

 private:
  Preference(PreferenceKind k, std::size_t dim) : kind_(k), dim_(dim) {}
  PreferenceKind kind_;
  std::size_t dim_;
  Vector params_;
  std::vector<int> coords_;
  std::optional<PolyhedralUtility> poly_;
};

/// Number of supporting points used to polyhedralize smooth upper sets.
inline constexpr int tangent_samples = 64;
/// Margin that turns strict preference into a closed constraint.
inline constexpr double strict_margin = 1e-7;

/// Polyhedral inner description of { x : x weakly better than f } (margin 0) or
/// of bundles beating f by the margin. Exact for polyhedral, linear and
/// coordinate-list preferences; tangent points on the level set for Cobb-Douglas.
UpperSet upper_set(const Preference& pref, const Vector& f, double margin = 0.0);

struct EconomyBlock {
  double mass = 1.0;
  Vector endowment;
  Preference preference;
};

/// Pure exchange economy on blocks E_1..E_r of a partitioned capacity.
class Economy {
 public:
  /// Blocks are vertical strips of the unit square carrying scaled
  /// product-section capacities with mu(E_i) = mass_i.
  static Economy continuum(std::vector<EconomyBlock> blocks, ConcaveFunction gamma = ConcaveFunction::sqrt());
  /// Each block is k atoms with mu(A n E_i) = mass_i gamma(|A n E_i| / k) / gamma(1).
  static Economy atomic(std::vector<EconomyBlock> blocks, int atoms_per_block,
                        ConcaveFunction gamma = ConcaveFunction::sqrt());

  const Capacity& capacity() const { return mu_; }
  const std::vector<Region>& regions() const { return regions_; }
  const std::vector<EconomyBlock>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  std::size_t dim() const { return blocks_.front().endowment.size(); }
  bool continuum_mode() const { return continuum_; }

  Allocation endowment() const;
  Allocation simple(const std::vector<Vector>& bundles) const;
  /// Block values of a block-constant allocation; Error(precondition) otherwise.
  std::vector<Vector> bundles(const Allocation& f) const;
  bool block_constant(const Allocation& f) const;

 private:
  Economy(Capacity mu, std::vector<Region> regions, std::vector<EconomyBlock> blocks, bool continuum);
  Capacity mu_;
  std::vector<Region> regions_;
  std::vector<EconomyBlock> blocks_;
  bool continuum_;
};

/// mu_f(X) == mu_e(X) componentwise.
Verdict feasibility(const Economy& eco, const Allocation& f);

/// Blockwise Choquet means of f.
Allocation average_allocation(const Economy& eco, const Allocation& f);

struct BudgetResult {
  bool bounded = true;
  double value = 0.0;
  Vector bundle;
};

/// max u_i(x) subject to p . x <= p . e_i, x >= 0.
BudgetResult budget_max(const Economy& eco, std::size_t block, const Vector& price);

struct WalrasCertificate {
  Status status = Status::pass;
  std::string detail;
  Vector price;
  std::vector<Vector> bundles;
  std::vector<double> utility;
  std::vector<double> optimum;
  std::vector<double> gap;
  std::vector<double> budget_slack;
  double feasibility_residual = 0.0;
  bool averaged = false;
  bool passed() const { return status == Status::pass; }
};

/// Feasibility plus budget maximality of every block bundle at price p.
/// Non-simple allocations are averaged first (flagged in the certificate).
WalrasCertificate walras_check(const Economy& eco, const Allocation& f, const Vector& price);

enum class ImprovementMode { weak, strong };

struct CoreVerdict {
  bool improved = false;
  ImprovementMode mode = ImprovementMode::weak;
  /// s_i = mu(S n E_i).
  Vector masses;
  /// Coalition members of block i are drawn from pools[i].
  std::vector<Region> pools;
  /// Block-constant improving bundles g_i (meaningful where masses[i] > 0).
  std::vector<Vector> bundles;
  bool on_grid = true;
  std::size_t coalitions_tested = 0;
  std::string detail;
};

/// Searches coalitions by block masses and block-constant improving bundles.
/// Strong mode asks for bundle balance inside every block, weak mode only on
/// the whole coalition.
CoreVerdict improvement_oracle(const Economy& eco, const Allocation& f, ImprovementMode mode, int grid);

/// Rebuilds the coalition as a region and re-evaluates preferences and the
/// resource identity from scratch.
Verdict verify_improvement(const Economy& eco, const Allocation& f, const CoreVerdict& witness,
                           ImprovementMode as);

/// For simple feasible f with homogeneous concave utilities: PASS iff
/// u_i(w_i) >= u_i(e_i) for every block with equality for at least one.
/// Throws Error(precondition) for non-simple f.
Verdict core_check_simple(const Economy& eco, const Allocation& f);

struct CoreCharacterization {
  Status status = Status::pass;
  std::string description;
  bool unique = false;
  std::vector<std::vector<Vector>> members;
  Vector price;
  std::size_t members_certified = 0;
  std::size_t nonmembers_tested = 0;
  std::size_t nonmembers_rejected = 0;
};

/// Core of an economy with a common concave utility that is linear on the span
/// of the endowments: the simple feasible f with u(w_i) = u(e_i). Throws
/// Error(precondition) when the utility is not common or not span-linear.
CoreCharacterization characterize_core(const Economy& eco, std::uint64_t seed = 20240601);

struct LcWalrasResult {
  Status status = Status::pass;
  std::string detail;
  CoreVerdict strong_check;
  SeparationResult separation;
  GammaReport gamma;
  Vector price;
  bool price_from_gradient = false;
  std::vector<double> value_gap;  // p.f_i - p.e_i
  WalrasCertificate certificate;
};

/// Walras certificate for a simple allocation that no coalition strongly
/// improves: builds the cone of preferred-minus-endowment gaps, separates it
/// and checks the price.
LcWalrasResult lc_to_walras(const Economy& eco, const Allocation& f, int grid = 16);

}  // namespace choquet
