#include "choquet/concave.hpp"

#include "choquet/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace choquet {

ConcaveFunction ConcaveFunction::sqrt() { return {Kind::sqrt, 0.5}; }
ConcaveFunction ConcaveFunction::log1p() { return {Kind::log1p, 0.0}; }

ConcaveFunction ConcaveFunction::power(double exponent) {
  if (!(exponent > 0.0 && exponent <= 1.0)) {
    fail(ErrorCode::malformed_utility, "power exponent must lie in (0, 1]");
  }
  return {Kind::power, exponent};
}

ConcaveFunction ConcaveFunction::linear(double slope) {
  if (!(slope >= 0.0) || !std::isfinite(slope)) {
    fail(ErrorCode::precondition, "linear function must have a finite nonnegative slope");
  }
  return {Kind::linear, slope};
}

ConcaveFunction ConcaveFunction::piecewise_linear(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) fail(ErrorCode::malformed_utility, "piecewise-linear function needs two breakpoints");
  if (points.front().first != 0.0) fail(ErrorCode::malformed_utility, "first breakpoint must be at x = 0");
  double previous_slope = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < points.size(); ++k) {
    double dx = points[k].first - points[k - 1].first;
    if (!(dx > 0.0)) fail(ErrorCode::malformed_utility, "breakpoints must be strictly increasing in x");
    double slope = (points[k].second - points[k - 1].second) / dx;
    if (slope < 0.0) {
      std::ostringstream os;
      os << "non-monotone sample: u decreases on [" << points[k - 1].first << ", " << points[k].first << "]";
      fail(ErrorCode::precondition, os.str());
    }
    if (slope > previous_slope * (1.0 + 1e-12) + 1e-15) {
      std::ostringstream os;
      os << "chord check failed: slope increases at x = " << points[k - 1].first;
      fail(ErrorCode::malformed_utility, os.str());
    }
    previous_slope = slope;
  }
  ConcaveFunction f(Kind::piecewise_linear, 0.0);
  f.points_ = std::move(points);
  return f;
}

double ConcaveFunction::operator()(double x) const {
  if (!(x >= 0.0) || !std::isfinite(x)) fail(ErrorCode::domain, "concave function evaluated outside [0, inf)");
  switch (kind_) {
    case Kind::sqrt: return std::sqrt(x);
    case Kind::log1p: return std::log1p(x);
    case Kind::power: return std::pow(x, param_);
    case Kind::linear: return param_ * x;
    case Kind::piecewise_linear: {
      std::size_t k = 1;
      while (k + 1 < points_.size() && x > points_[k].first) ++k;
      const auto& [x0, y0] = points_[k - 1];
      const auto& [x1, y1] = points_[k];
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return 0.0;
}

bool ConcaveFunction::is_linear() const {
  if (kind_ == Kind::linear) return true;
  if (kind_ == Kind::power) return param_ == 1.0;
  if (kind_ == Kind::piecewise_linear) {
    if (points_.front().second != 0.0) return false;
    double s0 = (points_[1].second - points_[0].second) / (points_[1].first - points_[0].first);
    for (std::size_t k = 2; k < points_.size(); ++k) {
      double s = (points_[k].second - points_[k - 1].second) / (points_[k].first - points_[k - 1].first);
      if (std::abs(s - s0) > 1e-12) return false;
    }
    return true;
  }
  return false;
}

std::string ConcaveFunction::name() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::sqrt: return "sqrt";
    case Kind::log1p: return "log1p";
    case Kind::power: os << "power:" << param_; return os.str();
    case Kind::linear: os << "linear:" << param_; return os.str();
    case Kind::piecewise_linear: return "piecewise_linear";
  }
  return "?";
}

PolyhedralUtility::PolyhedralUtility(std::vector<AffinePiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) fail(ErrorCode::malformed_utility, "polyhedral utility needs at least one affine piece");
  dim_ = pieces_.front().slope.size();
  if (dim_ == 0) fail(ErrorCode::malformed_utility, "polyhedral utility has zero dimension");
  for (const auto& p : pieces_) {
    if (p.slope.size() != dim_) fail(ErrorCode::malformed_utility, "affine pieces have ragged dimensions");
    for (double a : p.slope) {
      if (!(a >= 0.0) || !std::isfinite(a)) {
        fail(ErrorCode::malformed_utility, "affine piece has a negative slope, utility would not be increasing");
      }
    }
    if (!std::isfinite(p.intercept)) fail(ErrorCode::malformed_utility, "non-finite intercept");
  }
  if ((*this)(std::vector<double>(dim_, 0.0)) < 0.0) {
    fail(ErrorCode::malformed_utility, "polyhedral utility is negative at the origin");
  }
}

double PolyhedralUtility::operator()(const std::vector<double>& x) const {
  return [&] {
    const auto& p = pieces_[active_piece(x)];
    double v = p.intercept;
    for (std::size_t j = 0; j < dim_; ++j) v += p.slope[j] * x[j];
    return v;
  }();
}

std::size_t PolyhedralUtility::active_piece(const std::vector<double>& x) const {
  if (x.size() != dim_) fail(ErrorCode::invalid_argument, "bundle dimension does not match utility");
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    double v = pieces_[k].intercept;
    for (std::size_t j = 0; j < dim_; ++j) v += pieces_[k].slope[j] * x[j];
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  return best;
}

}  // namespace choquet
