#pragma once

#include "choquet/rational.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace choquet {

enum class SetOp { unite, intersect, difference, symmetric_difference };

/// Half-open interval [lo, hi).
struct Interval {
  Rational lo;
  Rational hi;

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of half-open intervals, kept sorted, disjoint and with touching
/// pieces merged, so two equal sets always have identical representations.
class IntervalSet {
 public:
  IntervalSet() = default;

  static IntervalSet from_intervals(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  Rational length() const;
  bool contains(const Rational& x) const;

  static IntervalSet combine(const IntervalSet& a, const IntervalSet& b, SetOp op);

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

 private:
  std::vector<Interval> intervals_;
};

/// A y-section of a rectangle union: the x-intervals it hits.
using Section1D = IntervalSet;

/// Half-open rectangle [x0,x1) x [y0,y1) inside the unit square.
struct Rect {
  Rational x0, x1, y0, y1;

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Finite union of half-open rectangles in [0,1)^2, stored as a vertical slab
/// decomposition: slabs sorted by x, each carrying the y-set over its x-range.
/// Adjacent slabs with equal y-sets are merged, which makes the form canonical.
class RectUnion {
 public:
  struct Slab {
    Rational x0;
    Rational x1;
    IntervalSet ys;

    friend bool operator==(const Slab&, const Slab&) = default;
  };

  RectUnion() = default;

  /// Validates 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1 for every rectangle.
  static RectUnion from_rects(std::span<const Rect> rects);
  static RectUnion full();

  const std::vector<Slab>& slabs() const { return slabs_; }
  std::vector<Rect> rects() const;
  bool empty() const { return slabs_.empty(); }

  /// Lebesgue area.
  Rational area() const;
  bool contains(const Rational& x, const Rational& y) const;

  /// {x : (x, y) in this}; y must lie in [0, 1).
  Section1D section_at(const Rational& y) const;

  /// Intersection with the horizontal strip [0,1) x [0, tau).
  RectUnion below(const Rational& tau) const;

  /// Sorted distinct y-coordinates at which some section can change.
  std::vector<Rational> y_breakpoints() const;

  static RectUnion combine(const RectUnion& a, const RectUnion& b, SetOp op);

  friend bool operator==(const RectUnion&, const RectUnion&) = default;

 private:
  static RectUnion from_slabs(std::vector<Slab> slabs);
  std::vector<Slab> slabs_;
};

/// Subset of the finite universe {0, ..., size-1}, size <= 63.
class AtomSet {
 public:
  static constexpr int max_universe = 63;

  AtomSet() = default;
  AtomSet(int universe_size, std::uint64_t mask);
  static AtomSet from_members(int universe_size, std::span<const int> members);
  static AtomSet full(int universe_size);

  int universe_size() const { return size_; }
  std::uint64_t mask() const { return mask_; }
  bool empty() const { return mask_ == 0; }
  bool contains(int atom) const { return atom >= 0 && atom < size_ && ((mask_ >> atom) & 1U); }
  int count() const;
  std::vector<int> members() const;

  friend bool operator==(const AtomSet&, const AtomSet&) = default;

 private:
  int size_ = 0;
  std::uint64_t mask_ = 0;
};

/// Identifies the ground set a region lives in.
struct Universe {
  enum class Kind { atoms, unit_square };
  Kind kind = Kind::unit_square;
  int atoms = 0;

  static Universe finite(int n) { return {Kind::atoms, n}; }
  static Universe square() { return {Kind::unit_square, 0}; }

  friend bool operator==(const Universe&, const Universe&) = default;
};

std::string describe(const Universe& u);

/// A measurable set: a finite atom subset or a rectangle union in the unit square.
class Region {
 public:
  Region() : repr_(RectUnion{}) {}
  Region(AtomSet atoms) : repr_(std::move(atoms)) {}
  Region(RectUnion rects) : repr_(std::move(rects)) {}

  static Region full(const Universe& u);
  static Region empty(const Universe& u);

  Universe universe() const;
  bool is_atoms() const { return std::holds_alternative<AtomSet>(repr_); }
  bool is_rects() const { return std::holds_alternative<RectUnion>(repr_); }
  const AtomSet& atoms() const { return std::get<AtomSet>(repr_); }
  const RectUnion& rects() const { return std::get<RectUnion>(repr_); }
  bool empty() const;

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::variant<AtomSet, RectUnion> repr_;
};

/// Throws Error(universe_mismatch) when a and b live in different universes.
Region combine(const Region& a, const Region& b, SetOp op);
Region complement(const Region& a);
bool is_subset(const Region& a, const Region& b);

inline Region operator|(const Region& a, const Region& b) { return combine(a, b, SetOp::unite); }
inline Region operator&(const Region& a, const Region& b) { return combine(a, b, SetOp::intersect); }
inline Region operator-(const Region& a, const Region& b) { return combine(a, b, SetOp::difference); }
inline Region operator^(const Region& a, const Region& b) {
  return combine(a, b, SetOp::symmetric_difference);
}

/// Exact Lebesgue area of a rectangle union.
inline Rational lebesgue_area(const RectUnion& b) { return b.area(); }

/// Throws Error(domain) unless 0 <= y < 1.
inline Section1D section_at(const RectUnion& b, const Rational& y) { return b.section_at(y); }

std::string to_string(const Region& r);

}  // namespace choquet
