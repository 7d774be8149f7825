#include "choquet/regions.hpp"

#include "choquet/error.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace choquet {

namespace {

bool apply(SetOp op, bool in_a, bool in_b) {
  switch (op) {
    case SetOp::unite: return in_a || in_b;
    case SetOp::intersect: return in_a && in_b;
    case SetOp::difference: return in_a && !in_b;
    case SetOp::symmetric_difference: return in_a != in_b;
  }
  return false;
}

void sort_unique(std::vector<Rational>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool in_unit(const Rational& v) { return v >= 0 && v <= 1; }

}  // namespace

// ---------------------------------------------------------------- IntervalSet

IntervalSet IntervalSet::from_intervals(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& iv) { return !(iv.lo < iv.hi); });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (auto& iv : intervals) {
    if (!out.intervals_.empty() && iv.lo <= out.intervals_.back().hi) {
      if (iv.hi > out.intervals_.back().hi) out.intervals_.back().hi = iv.hi;
    } else {
      out.intervals_.push_back(std::move(iv));
    }
  }
  return out;
}

Rational IntervalSet::length() const {
  Rational total = 0;
  for (const auto& iv : intervals_) total += iv.hi - iv.lo;
  return total;
}

bool IntervalSet::contains(const Rational& x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](const Rational& v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return false;
  --it;
  return x >= it->lo && x < it->hi;
}

IntervalSet IntervalSet::combine(const IntervalSet& a, const IntervalSet& b, SetOp op) {
  std::vector<Rational> points;
  points.reserve(2 * (a.intervals_.size() + b.intervals_.size()));
  for (const auto* s : {&a, &b}) {
    for (const auto& iv : s->intervals_) {
      points.push_back(iv.lo);
      points.push_back(iv.hi);
    }
  }
  sort_unique(points);
  std::vector<Interval> pieces;
  for (std::size_t k = 0; k + 1 < points.size(); ++k) {
    // Membership is constant on [points[k], points[k+1]).
    if (apply(op, a.contains(points[k]), b.contains(points[k]))) {
      pieces.push_back({points[k], points[k + 1]});
    }
  }
  return from_intervals(std::move(pieces));
}

// ------------------------------------------------------------------ RectUnion

RectUnion RectUnion::from_slabs(std::vector<Slab> slabs) {
  RectUnion out;
  for (auto& s : slabs) {
    if (s.ys.empty() || !(s.x0 < s.x1)) continue;
    if (!out.slabs_.empty() && out.slabs_.back().x1 == s.x0 && out.slabs_.back().ys == s.ys) {
      out.slabs_.back().x1 = s.x1;
    } else {
      out.slabs_.push_back(std::move(s));
    }
  }
  return out;
}

RectUnion RectUnion::from_rects(std::span<const Rect> rects) {
  std::vector<Rational> xs;
  for (const auto& r : rects) {
    if (!(in_unit(r.x0) && in_unit(r.x1) && in_unit(r.y0) && in_unit(r.y1)) || !(r.x0 < r.x1) ||
        !(r.y0 < r.y1)) {
      fail(ErrorCode::domain, "rectangle [" + to_string(r.x0) + "," + to_string(r.x1) + ")x[" +
                                  to_string(r.y0) + "," + to_string(r.y1) +
                                  ") is not a nonempty half-open box in the unit square");
    }
    xs.push_back(r.x0);
    xs.push_back(r.x1);
  }
  sort_unique(xs);
  std::vector<Slab> slabs;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    std::vector<Interval> ys;
    for (const auto& r : rects) {
      if (r.x0 <= xs[k] && xs[k] < r.x1) ys.push_back({r.y0, r.y1});
    }
    slabs.push_back({xs[k], xs[k + 1], IntervalSet::from_intervals(std::move(ys))});
  }
  return from_slabs(std::move(slabs));
}

RectUnion RectUnion::full() {
  Rect r{0, 1, 0, 1};
  return from_rects(std::span<const Rect>(&r, 1));
}

std::vector<Rect> RectUnion::rects() const {
  std::vector<Rect> out;
  for (const auto& s : slabs_) {
    for (const auto& iv : s.ys.intervals()) out.push_back({s.x0, s.x1, iv.lo, iv.hi});
  }
  return out;
}

Rational RectUnion::area() const {
  Rational total = 0;
  for (const auto& s : slabs_) total += (s.x1 - s.x0) * s.ys.length();
  return total;
}

bool RectUnion::contains(const Rational& x, const Rational& y) const {
  for (const auto& s : slabs_) {
    if (x < s.x0) return false;
    if (x < s.x1) return s.ys.contains(y);
  }
  return false;
}

Section1D RectUnion::section_at(const Rational& y) const {
  if (y < 0 || y >= 1) fail(ErrorCode::domain, "section height " + to_string(y) + " outside [0,1)");
  std::vector<Interval> xs;
  for (const auto& s : slabs_) {
    if (s.ys.contains(y)) xs.push_back({s.x0, s.x1});
  }
  return IntervalSet::from_intervals(std::move(xs));
}

RectUnion RectUnion::below(const Rational& tau) const {
  if (tau <= 0) return {};
  if (tau >= 1) return *this;
  IntervalSet strip = IntervalSet::from_intervals({{0, tau}});
  std::vector<Slab> slabs;
  slabs.reserve(slabs_.size());
  for (const auto& s : slabs_) {
    slabs.push_back({s.x0, s.x1, IntervalSet::combine(s.ys, strip, SetOp::intersect)});
  }
  return from_slabs(std::move(slabs));
}

std::vector<Rational> RectUnion::y_breakpoints() const {
  std::vector<Rational> ys;
  for (const auto& s : slabs_) {
    for (const auto& iv : s.ys.intervals()) {
      ys.push_back(iv.lo);
      ys.push_back(iv.hi);
    }
  }
  sort_unique(ys);
  return ys;
}

RectUnion RectUnion::combine(const RectUnion& a, const RectUnion& b, SetOp op) {
  std::vector<Rational> xs;
  for (const auto* u : {&a, &b}) {
    for (const auto& s : u->slabs_) {
      xs.push_back(s.x0);
      xs.push_back(s.x1);
    }
  }
  sort_unique(xs);

  auto ys_at = [](const RectUnion& u, std::size_t& cursor, const Rational& x) -> const IntervalSet* {
    while (cursor < u.slabs_.size() && u.slabs_[cursor].x1 <= x) ++cursor;
    if (cursor < u.slabs_.size() && u.slabs_[cursor].x0 <= x) return &u.slabs_[cursor].ys;
    return nullptr;
  };

  static const IntervalSet nothing;
  std::size_t ca = 0;
  std::size_t cb = 0;
  std::vector<Slab> slabs;
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    const IntervalSet* ya = ys_at(a, ca, xs[k]);
    const IntervalSet* yb = ys_at(b, cb, xs[k]);
    slabs.push_back({xs[k], xs[k + 1],
                     IntervalSet::combine(ya ? *ya : nothing, yb ? *yb : nothing, op)});
  }
  return from_slabs(std::move(slabs));
}

// -------------------------------------------------------------------- AtomSet

AtomSet::AtomSet(int universe_size, std::uint64_t mask) : size_(universe_size), mask_(mask) {
  if (universe_size < 1 || universe_size > max_universe) {
    fail(ErrorCode::domain, "atom universe size must be in [1, 63]");
  }
  if (universe_size < 64 && (mask >> universe_size) != 0) {
    fail(ErrorCode::domain, "atom set has members outside its universe");
  }
}

AtomSet AtomSet::from_members(int universe_size, std::span<const int> members) {
  std::uint64_t mask = 0;
  for (int m : members) {
    if (m < 0 || m >= universe_size) {
      fail(ErrorCode::domain, "atom " + std::to_string(m) + " outside universe of size " +
                                  std::to_string(universe_size));
    }
    mask |= std::uint64_t{1} << m;
  }
  return AtomSet(universe_size, mask);
}

AtomSet AtomSet::full(int universe_size) {
  return AtomSet(universe_size, (std::uint64_t{1} << universe_size) - 1);
}

int AtomSet::count() const { return std::popcount(mask_); }

std::vector<int> AtomSet::members() const {
  std::vector<int> out;
  for (int i = 0; i < size_; ++i) {
    if (contains(i)) out.push_back(i);
  }
  return out;
}

// --------------------------------------------------------------------- Region

std::string describe(const Universe& u) {
  if (u.kind == Universe::Kind::unit_square) return "unit square";
  return "atoms{0.." + std::to_string(u.atoms - 1) + "}";
}

Region Region::full(const Universe& u) {
  if (u.kind == Universe::Kind::atoms) return Region(AtomSet::full(u.atoms));
  return Region(RectUnion::full());
}

Region Region::empty(const Universe& u) {
  if (u.kind == Universe::Kind::atoms) return Region(AtomSet(u.atoms, 0));
  return Region(RectUnion{});
}

Universe Region::universe() const {
  if (is_atoms()) return Universe::finite(atoms().universe_size());
  return Universe::square();
}

bool Region::empty() const { return is_atoms() ? atoms().empty() : rects().empty(); }

Region combine(const Region& a, const Region& b, SetOp op) {
  if (!(a.universe() == b.universe())) {
    fail(ErrorCode::universe_mismatch,
         "cannot combine regions over " + describe(a.universe()) + " and " + describe(b.universe()));
  }
  if (a.is_rects()) return Region(RectUnion::combine(a.rects(), b.rects(), op));
  std::uint64_t x = a.atoms().mask();
  std::uint64_t y = b.atoms().mask();
  std::uint64_t r = 0;
  switch (op) {
    case SetOp::unite: r = x | y; break;
    case SetOp::intersect: r = x & y; break;
    case SetOp::difference: r = x & ~y; break;
    case SetOp::symmetric_difference: r = x ^ y; break;
  }
  return Region(AtomSet(a.atoms().universe_size(), r));
}

Region complement(const Region& a) { return combine(Region::full(a.universe()), a, SetOp::difference); }

bool is_subset(const Region& a, const Region& b) { return combine(a, b, SetOp::difference).empty(); }

std::string to_string(const Region& r) {
  std::ostringstream os;
  if (r.is_atoms()) {
    os << "{";
    bool first = true;
    for (int m : r.atoms().members()) {
      os << (first ? "" : ",") << m;
      first = false;
    }
    os << "}";
    return os.str();
  }
  if (r.rects().empty()) return "{}";
  bool first = true;
  for (const auto& rc : r.rects().rects()) {
    os << (first ? "" : " u ") << "[" << to_string(rc.x0) << "," << to_string(rc.x1) << ")x["
       << to_string(rc.y0) << "," << to_string(rc.y1) << ")";
    first = false;
  }
  return os.str();
}

}  // namespace choquet
