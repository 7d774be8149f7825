#pragma once

#include "choquet/regions.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace choquet {

enum class Status { pass, fail, inconclusive };

const char* to_string(Status s) noexcept;

/// Outcome of a checker. A failing verdict carries the sets that witness the
/// violation; randomized checkers record their seed.
struct Verdict {
  Status status = Status::pass;
  std::string detail;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, Region>> witness;
  std::optional<std::uint64_t> seed;
  std::size_t cases = 0;

  bool passed() const { return status == Status::pass; }

  Verdict& value(std::string name, double v) {
    values.emplace_back(std::move(name), v);
    return *this;
  }
  std::optional<double> find_value(const std::string& name) const {
    for (const auto& [k, v] : values) {
      if (k == name) return v;
    }
    return std::nullopt;
  }
};

}  // namespace choquet
