#pragma once

#include <cstddef>
#include <vector>

namespace choquet {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size() && j < b.size(); ++j) s += a[j] * b[j];
  return s;
}

}  // namespace choquet
