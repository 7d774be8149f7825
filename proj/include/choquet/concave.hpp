#pragma once

#include <string>
#include <utility>
#include <vector>

namespace choquet {

/// Concave nondecreasing function on [0, inf). Used both as the distortion of a
/// product-section capacity and as the scalar utility in Jensen checks.
class ConcaveFunction {
 public:
  enum class Kind { sqrt, log1p, power, linear, piecewise_linear };

  static ConcaveFunction sqrt();
  static ConcaveFunction log1p();
  /// x^exponent, exponent in (0, 1].
  static ConcaveFunction power(double exponent);
  static ConcaveFunction linear(double slope);
  /// Breakpoints (x, y) with x strictly increasing and starting at 0; extended past
  /// the last breakpoint with the last slope. Throws Error(precondition) when a
  /// segment decreases and Error(malformed_utility) when slopes increase.
  static ConcaveFunction piecewise_linear(std::vector<std::pair<double, double>> points);

  /// Throws Error(domain) for negative or non-finite x.
  double operator()(double x) const;

  Kind kind() const { return kind_; }
  double parameter() const { return param_; }
  const std::vector<std::pair<double, double>>& breakpoints() const { return points_; }
  bool is_linear() const;
  std::string name() const;

 private:
  ConcaveFunction(Kind kind, double param) : kind_(kind), param_(param) {}

  Kind kind_;
  double param_ = 0.0;
  std::vector<std::pair<double, double>> points_;
};

/// One affine majorant a.x + c of a polyhedral utility.
struct AffinePiece {
  std::vector<double> slope;
  double intercept = 0.0;
};

/// u(x) = min_k (a_k . x + c_k) on the nonnegative orthant, with a_k >= 0 so u is
/// nondecreasing. Every piece is a supporting affine majorant wherever it is active.
class PolyhedralUtility {
 public:
  PolyhedralUtility() = default;
  /// Throws Error(malformed_utility) for empty input, ragged dimensions, negative
  /// slopes, or u(0) < 0.
  explicit PolyhedralUtility(std::vector<AffinePiece> pieces);

  std::size_t dim() const { return dim_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }

  double operator()(const std::vector<double>& x) const;
  /// Index of a majorant attaining the minimum at x.
  std::size_t active_piece(const std::vector<double>& x) const;

 private:
  std::vector<AffinePiece> pieces_;
  std::size_t dim_ = 0;
};

}  // namespace choquet
