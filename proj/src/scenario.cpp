#include "choquet/scenario.hpp"

#include "choquet/error.hpp"

#include <json.hpp>

#include <chrono>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace choquet::scenario {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  fail(ErrorCode::parse, "at " + (path.empty() ? std::string("/") : path) + ": " + msg);
}

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string at(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

void allow(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(path, "expected an object");
  for (const auto& [k, v] : j.items()) {
    bool known = false;
    for (const char* key : keys) known = known || k == key;
    if (!known) bad(at(path, k), "unknown field");
  }
}

const json& need(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(at(path, key), "missing field");
  return *it;
}

double num(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) bad(path, "expected a finite number");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<int>();
}

std::string str(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

// Numbers go through their shortest decimal form, so 0.1 means 1/10.
Rational rat(const json& j, const std::string& path) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number()) {
      char buf[64];
      auto res = std::to_chars(buf, buf + sizeof buf, j.get<double>());
      return parse_rational(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
    }
  } catch (const Error& e) {
    bad(path, e.what());
  }
  bad(path, "expected a rational (number or \"p/q\" string)");
}

Vector vec(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a nonempty array of numbers");
  Vector v;
  for (std::size_t i = 0; i < j.size(); ++i) v.push_back(num(j[i], at(path, i)));
  return v;
}

// Re-raises library errors met while building a payload with the field path.
template <class F>
auto guarded(const std::string& path, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse || e.code() == ErrorCode::internal_invariant) throw;
    throw Error(e.code(), "at " + path + ": " + e.what());
  }
}

ConcaveFunction parse_gamma(const json& j, const std::string& path) {
  std::string kind;
  if (j.is_string()) {
    kind = j.get<std::string>();
    if (kind == "sqrt") return ConcaveFunction::sqrt();
    if (kind == "log1p") return ConcaveFunction::log1p();
    bad(path, "unknown distortion \"" + kind + "\"");
  }
  allow(j, path, {"kind", "exponent", "slope", "points"});
  kind = str(need(j, path, "kind"), at(path, "kind"));
  return guarded(path, [&] {
    if (kind == "sqrt") return ConcaveFunction::sqrt();
    if (kind == "log1p") return ConcaveFunction::log1p();
    if (kind == "power") return ConcaveFunction::power(num(need(j, path, "exponent"), at(path, "exponent")));
    if (kind == "linear") return ConcaveFunction::linear(num(need(j, path, "slope"), at(path, "slope")));
    if (kind == "piecewise_linear") {
      const json& pts = need(j, path, "points");
      if (!pts.is_array()) bad(at(path, "points"), "expected an array of [x, y] pairs");
      std::vector<std::pair<double, double>> out;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        Vector p = vec(pts[i], at(at(path, "points"), i));
        if (p.size() != 2) bad(at(at(path, "points"), i), "expected [x, y]");
        out.emplace_back(p[0], p[1]);
      }
      return ConcaveFunction::piecewise_linear(std::move(out));
    }
    bad(at(path, "kind"), "unknown distortion \"" + kind + "\"");
  });
}

Region region_of(const json& j, const std::string& path, const Universe& u) {
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "full") return Region::full(u);
    if (s == "empty") return Region::empty(u);
    bad(path, "expected \"full\", \"empty\" or a region object");
  }
  allow(j, path, {"atoms", "rects"});
  if (j.contains("atoms") == j.contains("rects")) bad(path, "give exactly one of \"atoms\" and \"rects\"");
  if (j.contains("atoms")) {
    if (u.kind != Universe::Kind::atoms) bad(at(path, "atoms"), "atom sets need a finite universe");
    const json& a = j["atoms"];
    if (!a.is_array()) bad(at(path, "atoms"), "expected an array of atom indices");
    std::vector<int> members;
    for (std::size_t i = 0; i < a.size(); ++i) {
      int m = integer(a[i], at(at(path, "atoms"), i));
      if (m < 0 || m >= u.atoms) bad(at(at(path, "atoms"), i), "atom out of range");
      members.push_back(m);
    }
    return Region(AtomSet::from_members(u.atoms, members));
  }
  if (u.kind != Universe::Kind::unit_square) bad(at(path, "rects"), "rectangles need the unit square");
  const json& rs = j["rects"];
  if (!rs.is_array()) bad(at(path, "rects"), "expected an array of [x0, x1, y0, y1]");
  std::vector<Rect> rects;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    std::string p = at(at(path, "rects"), i);
    if (!rs[i].is_array() || rs[i].size() != 4) bad(p, "expected [x0, x1, y0, y1]");
    rects.push_back({rat(rs[i][0], at(p, 0)), rat(rs[i][1], at(p, 1)), rat(rs[i][2], at(p, 2)), rat(rs[i][3], at(p, 3))});
  }
  return guarded(path, [&] { return Region(RectUnion::from_rects(rects)); });
}

Capacity capacity_of(const json& j, const std::string& path) {
  allow(j, path, {"kind", "gamma", "scale", "atoms", "table", "weights", "blocks", "parts", "base", "continuous_from_below"});
  std::string kind = str(need(j, path, "kind"), at(path, "kind"));
  Capacity mu = guarded(path, [&]() -> Capacity {
    if (kind == "product_section") {
      ConcaveFunction g = j.contains("gamma") ? parse_gamma(j["gamma"], at(path, "gamma")) : ConcaveFunction::sqrt();
      double scale = j.contains("scale") ? num(j["scale"], at(path, "scale")) : 1.0;
      return Capacity::product_section(g, scale);
    }
    if (kind == "explicit") {
      int n = integer(need(j, path, "atoms"), at(path, "atoms"));
      const json& t = need(j, path, "table");
      if (!t.is_array()) bad(at(path, "table"), "expected an array of 2^atoms values");
      std::vector<Rational> table;
      for (std::size_t i = 0; i < t.size(); ++i) table.push_back(rat(t[i], at(at(path, "table"), i)));
      return Capacity::explicit_table(n, std::move(table));
    }
    if (kind == "additive") {
      const json& w = need(j, path, "weights");
      if (!w.is_array()) bad(at(path, "weights"), "expected an array");
      std::vector<Rational> ws;
      for (std::size_t i = 0; i < w.size(); ++i) ws.push_back(rat(w[i], at(at(path, "weights"), i)));
      return Capacity::additive(ws);
    }
    if (kind == "partitioned") {
      const json& ps = need(j, path, "parts");
      const json& bs = need(j, path, "blocks");
      if (!ps.is_array() || ps.empty()) bad(at(path, "parts"), "expected a nonempty array of capacities");
      if (!bs.is_array()) bad(at(path, "blocks"), "expected an array of regions");
      std::vector<Capacity> parts;
      for (std::size_t i = 0; i < ps.size(); ++i) parts.push_back(capacity_of(ps[i], at(at(path, "parts"), i)));
      std::vector<Region> blocks;
      for (std::size_t i = 0; i < bs.size(); ++i) {
        blocks.push_back(region_of(bs[i], at(at(path, "blocks"), i), parts.front().universe()));
      }
      return Capacity::partitioned(std::move(blocks), std::move(parts));
    }
    if (kind == "conjugate") return capacity_of(need(j, path, "base"), at(path, "base")).conjugate();
    bad(at(path, "kind"), "unknown capacity kind \"" + kind + "\"");
  });
  if (j.contains("continuous_from_below")) {
    if (!j["continuous_from_below"].is_boolean()) bad(at(path, "continuous_from_below"), "expected a boolean");
    mu = mu.with_declared_continuity(j["continuous_from_below"].get<bool>());
  }
  return mu;
}

StepFunction function_of(const json& j, const std::string& path, const Universe& u) {
  allow(j, path, {"pieces", "constant"});
  if (j.contains("constant")) {
    if (j.contains("pieces")) bad(path, "give either \"pieces\" or \"constant\"");
    return StepFunction::constant(u, num(j["constant"], at(path, "constant")));
  }
  const json& ps = need(j, path, "pieces");
  if (!ps.is_array()) bad(at(path, "pieces"), "expected an array");
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    std::string p = at(at(path, "pieces"), i);
    allow(ps[i], p, {"region", "value"});
    pieces.push_back({region_of(need(ps[i], p, "region"), at(p, "region"), u), num(need(ps[i], p, "value"), at(p, "value"))});
  }
  return guarded(path, [&] { return StepFunction(u, std::move(pieces)); });
}

Preference preference_of(const json& j, const std::string& path, std::size_t n) {
  allow(j, path, {"kind", "alpha", "c", "pieces", "coords"});
  std::string kind = str(need(j, path, "kind"), at(path, "kind"));
  return guarded(path, [&] {
    if (kind == "cobb_douglas") return Preference::cobb_douglas(vec(need(j, path, "alpha"), at(path, "alpha")));
    if (kind == "linear") return Preference::linear(vec(need(j, path, "c"), at(path, "c")));
    if (kind == "polyhedral") {
      const json& ps = need(j, path, "pieces");
      if (!ps.is_array()) bad(at(path, "pieces"), "expected an array of affine pieces");
      std::vector<AffinePiece> pieces;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        std::string p = at(at(path, "pieces"), i);
        allow(ps[i], p, {"slope", "intercept"});
        double c = ps[i].contains("intercept") ? num(ps[i]["intercept"], at(p, "intercept")) : 0.0;
        pieces.push_back({vec(need(ps[i], p, "slope"), at(p, "slope")), c});
      }
      return Preference::polyhedral(PolyhedralUtility(std::move(pieces)));
    }
    if (kind == "coordinate_list") {
      // Commodities are numbered from 1 in scenario files.
      const json& cs = need(j, path, "coords");
      if (!cs.is_array()) bad(at(path, "coords"), "expected an array of commodity numbers");
      std::vector<int> coords;
      for (std::size_t i = 0; i < cs.size(); ++i) coords.push_back(integer(cs[i], at(at(path, "coords"), i)) - 1);
      return Preference::coordinate_list(std::move(coords), n);
    }
    bad(at(path, "kind"), "unknown preference kind \"" + kind + "\"");
  });
}

Economy economy_of(const json& j, const std::string& path) {
  allow(j, path, {"blocks", "capacity_per_block"});
  const json& bs = need(j, path, "blocks");
  if (!bs.is_array() || bs.empty()) bad(at(path, "blocks"), "expected a nonempty array of blocks");
  std::vector<EconomyBlock> blocks;
  for (std::size_t i = 0; i < bs.size(); ++i) {
    std::string p = at(at(path, "blocks"), i);
    allow(bs[i], p, {"mass", "endowment", "preference"});
    double mass = bs[i].contains("mass") ? num(bs[i]["mass"], at(p, "mass")) : 1.0;
    Vector e = vec(need(bs[i], p, "endowment"), at(p, "endowment"));
    Preference pref = preference_of(need(bs[i], p, "preference"), at(p, "preference"), e.size());
    if (pref.dim() != e.size()) bad(at(p, "preference"), "preference dimension differs from the endowment");
    blocks.push_back({mass, std::move(e), std::move(pref)});
  }
  std::string kind = "product_section";
  ConcaveFunction gamma = ConcaveFunction::sqrt();
  int atoms = 2;
  if (j.contains("capacity_per_block")) {
    std::string cp = at(path, "capacity_per_block");
    const json& c = j["capacity_per_block"];
    allow(c, cp, {"kind", "gamma", "atoms_per_block"});
    if (c.contains("kind")) kind = str(c["kind"], at(cp, "kind"));
    if (c.contains("gamma")) gamma = parse_gamma(c["gamma"], at(cp, "gamma"));
    if (c.contains("atoms_per_block")) atoms = integer(c["atoms_per_block"], at(cp, "atoms_per_block"));
    if (kind != "product_section" && kind != "atomic") bad(at(cp, "kind"), "expected \"product_section\" or \"atomic\"");
  }
  return guarded(path, [&] {
    return kind == "atomic" ? Economy::atomic(std::move(blocks), atoms, gamma)
                            : Economy::continuum(std::move(blocks), gamma);
  });
}

Allocation allocation_of(const json& j, const std::string& path, const Economy& eco) {
  if (j.is_array()) {
    if (j.size() != eco.size()) bad(path, "expected one bundle per block");
    std::vector<Vector> w;
    for (std::size_t i = 0; i < j.size(); ++i) {
      w.push_back(vec(j[i], at(path, i)));
      if (w.back().size() != eco.dim()) bad(at(path, i), "bundle has the wrong dimension");
    }
    return guarded(path, [&] { return eco.simple(w); });
  }
  allow(j, path, {"pieces"});
  const json& ps = need(j, path, "pieces");
  if (!ps.is_array()) bad(at(path, "pieces"), "expected an array");
  std::vector<VectorPiece> pieces;
  Universe u = eco.capacity().universe();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    std::string p = at(at(path, "pieces"), i);
    allow(ps[i], p, {"region", "value"});
    pieces.push_back({region_of(need(ps[i], p, "region"), at(p, "region"), u), vec(need(ps[i], p, "value"), at(p, "value"))});
  }
  return guarded(path, [&] { return Allocation(u, eco.dim(), std::move(pieces)); });
}

json parse_text(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, what + " is not valid JSON: " + e.what());
  }
}

// ---- checks ----

struct Context {
  std::optional<Capacity> mu;
  std::optional<StepFunction> f;
  std::optional<Economy> eco;
  std::uint64_t seed = default_seed;
  int grid = 16;
  double tol = 1e-9;
};

struct Call {
  const json& params;
  std::string path;
  Context& ctx;
  CheckResult& out;

  const Capacity& mu() const {
    if (!ctx.mu) bad(path, "this check needs a \"capacity\" payload");
    return *ctx.mu;
  }
  const StepFunction& f() const {
    if (!ctx.f) bad(path, "this check needs a \"function\" payload");
    return *ctx.f;
  }
  const Economy& eco() const {
    if (!ctx.eco) bad(path, "this check needs an \"economy\" payload");
    return *ctx.eco;
  }
  bool has(const char* k) const { return params.contains(k); }
  const json& get(const char* k) const { return need(params, path, k); }
  std::string key(const char* k) const { return at(path, k); }
  Region region(const char* k) const { return region_of(get(k), key(k), mu().universe()); }
  Allocation allocation() const {
    return has("allocation") ? allocation_of(params["allocation"], key("allocation"), eco()) : eco().endowment();
  }
  std::uint64_t seed() const {
    if (!has("seed")) return ctx.seed;
    const json& s = params["seed"];
    if (!s.is_number_unsigned()) bad(key("seed"), "expected a nonnegative integer");
    return s.get<std::uint64_t>();
  }
  int grid() const { return has("grid") ? integer(params["grid"], key("grid")) : ctx.grid; }
  void value(const std::string& name, double v) const { out.values.emplace_back(name, v); }
  void vector(const std::string& name, const Vector& v) const {
    for (std::size_t j = 0; j < v.size(); ++j) value(name + "[" + std::to_string(j) + "]", v[j]);
  }
  void witness(const std::string& name, const Region& r) const { out.witness.emplace_back(name, to_string(r)); }
  void take(const Verdict& v) const {
    out.status = v.status;
    out.detail = v.detail;
    for (const auto& [k, x] : v.values) value(k, x);
    for (const auto& [k, r] : v.witness) witness(k, r);
    if (v.seed) out.seed = v.seed;
  }
};

Property property_named(const std::string& s, const std::string& path) {
  for (Property p : {Property::monotone, Property::subadditive, Property::submodular, Property::zero_sets_union_stable}) {
    if (s == to_string(p)) return p;
  }
  bad(path, "unknown property \"" + s + "\"");
}

Region block_or_all(const Economy& eco, std::optional<std::size_t> block) {
  return block ? eco.regions()[*block] : Region::full(eco.capacity().universe());
}

struct OpSpec {
  const char* command;
  const char* tag;
  std::vector<const char*> params;
  std::function<void(const Call&)> run;
};

const std::map<std::string, OpSpec>& registry() {
  static const std::map<std::string, OpSpec> ops = {
      {"evaluate",
       {"capacity check", "capacity-evaluation", {"region"}, [](const Call& c) {
          Region a = c.region("region");
          c.value("mu(A)", c.mu()(a));
          if (auto e = c.mu().exact(a)) c.out.exact.emplace_back("mu(A)", to_string(*e));
          c.out.detail = "capacity of " + to_string(a);
        }}},
      {"property",
       {"capacity check", "capacity-property", {"property", "samples", "seed"}, [](const Call& c) {
          Property p = property_named(str(c.get("property"), c.key("property")), c.key("property"));
          CheckOptions o;
          o.seed = c.seed();
          o.tol = c.ctx.tol;
          if (c.has("samples")) o.samples = static_cast<std::size_t>(integer(c.params["samples"], c.key("samples")));
          c.out.tag = std::string("capacity-") + to_string(p);
          c.take(check_property(c.mu(), p, o));
          c.out.seed = o.seed;
        }}},
      {"submodular_pair",
       {"capacity check", "submodular-inequality", {"a", "b"}, [](const Call& c) {
          Region a = c.region("a"), b = c.region("b");
          const Capacity& mu = c.mu();
          double lhs = mu(a | b) + mu(a & b), rhs = mu(a) + mu(b);
          c.value("mu(A u B) + mu(A n B)", lhs);
          c.value("mu(A) + mu(B)", rhs);
          auto ea = mu.exact(a), eb = mu.exact(b), eu = mu.exact(a | b), ei = mu.exact(a & b);
          bool holds = lhs <= rhs + c.ctx.tol;
          if (ea && eb && eu && ei) {
            c.out.exact.emplace_back("mu(A u B) + mu(A n B)", to_string(Rational(*eu + *ei)));
            c.out.exact.emplace_back("mu(A) + mu(B)", to_string(Rational(*ea + *eb)));
            holds = *eu + *ei <= *ea + *eb;
          }
          c.out.status = holds ? Status::pass : Status::fail;
          c.out.detail = holds ? "submodular inequality holds for this pair" : "submodular inequality fails";
          if (!holds) {
            c.witness("A", a);
            c.witness("B", b);
          }
        }}},
      {"null_set",
       {"capacity check", "null-set", {"region", "seed"}, [](const Call& c) {
          CheckOptions o;
          o.seed = c.seed();
          o.tol = c.ctx.tol;
          c.take(is_null_set(c.mu(), c.region("region"), o));
          c.out.seed = o.seed;
        }}},
      {"half_subset",
       {"capacity check", "semiconvexity", {"region"}, [](const Call& c) {
          Region e = c.region("region");
          if (c.mu().semiconvex_constructive()) {
            Region h = split(c.mu(), e, 0.5);
            c.value("mu(E)", c.mu()(e));
            c.value("mu(F)", c.mu()(h));
            c.witness("F", h);
            c.out.detail = "half found by an exact split";
            return;
          }
          auto h = find_half_subset(c.mu(), e, c.ctx.tol);
          c.value("mu(E)", c.mu()(e));
          if (h) {
            c.value("mu(F)", c.mu()(*h));
            c.witness("F", *h);
            c.out.detail = "E splits into two halves";
          } else {
            c.out.status = Status::fail;
            c.out.detail = "no subset of E carries half its capacity";
            c.witness("E", e);
          }
        }}},
      {"split",
       {"capacity split", "semiconvex-split", {"region", "t"}, [](const Call& c) {
          Region a = c.region("region");
          double t = num(c.get("t"), c.key("t"));
          Region at_t = split(c.mu(), a, t);
          double target = t * c.mu()(a), got = c.mu()(at_t);
          c.value("mu(A_t)", got);
          c.value("t mu(A)", target);
          c.value("error", got - target);
          c.witness("A_t", at_t);
          bool ok = std::abs(got - target) <= split_tolerance * std::max(1.0, c.mu()(a));
          c.out.status = ok ? Status::pass : Status::fail;
          c.out.detail = ok ? "split hits the requested fraction" : "split misses the requested fraction";
        }}},
      {"integrate",
       {"choquet integrate", "choquet-integral", {"region"}, [](const Call& c) {
          if (c.has("region")) {
            Region e = c.region("region");
            c.value("int_E f dmu", choquet_integral(c.mu(), c.f(), e));
          } else {
            c.value("int f dmu", choquet_integral(c.mu(), c.f()));
          }
          c.out.detail = "closed-form level sum";
        }}},
      {"asymmetric",
       {"choquet integrate", "asymmetric-integral", {}, [](const Call& c) {
          c.value("int f dmu", asymmetric_integral(c.mu(), c.f()));
          c.out.detail = "signed integral";
        }}},
      {"conjugate_duality",
       {"choquet integrate", "conjugate-duality", {}, [](const Call& c) { c.take(conjugate_duality_check(c.mu(), c.f())); }}},
      {"subadditivity",
       {"choquet integrate", "integral-subadditivity", {"other"}, [](const Call& c) {
          StepFunction g = function_of(c.get("other"), c.key("other"), c.mu().universe());
          c.take(subadditivity_check(c.mu(), c.f(), g));
        }}},
      {"inheritance",
       {"choquet integrate", "indefinite-integral-inheritance", {"seed"}, [](const Call& c) {
          CheckOptions o;
          o.seed = c.seed();
          o.tol = c.ctx.tol;
          c.out.seed = o.seed;
          std::string detail;
          for (const auto& line : indefinite(c.mu(), c.f()).inheritance_report(o)) {
            std::string p = to_string(line.property);
            c.value(p + ".base", line.base_holds ? 1.0 : 0.0);
            c.value(p + ".derived", line.derived.passed() ? 1.0 : 0.0);
            if (line.base_holds && !line.derived.passed()) {
              c.out.status = Status::fail;
              detail += p + " is not inherited; ";
              for (const auto& [k, r] : line.derived.witness) c.witness(p + "." + k, r);
            }
          }
          c.out.detail = detail.empty() ? "every property of mu carries over to mu_f" : detail;
        }}},
      {"jensen",
       {"choquet jensen", "jensen-inequality", {"utility"}, [](const Call& c) {
          ConcaveFunction u = c.has("utility") ? parse_gamma(c.params["utility"], c.key("utility")) : ConcaveFunction::sqrt();
          c.take(jensen_scalar(c.mu(), c.f(), u));
        }}},
      {"feasibility",
       {"economy core-check", "feasibility", {"allocation"}, [](const Call& c) { c.take(feasibility(c.eco(), c.allocation())); }}},
      {"average",
       {"economy core-check", "average-allocation", {"allocation"}, [](const Call& c) {
          auto w = c.eco().bundles(average_allocation(c.eco(), c.allocation()));
          for (std::size_t i = 0; i < w.size(); ++i) c.vector("w_" + std::to_string(i), w[i]);
          c.out.detail = "blockwise means";
        }}},
      {"budget",
       {"economy walras", "budget-maximization", {"block", "price"}, [](const Call& c) {
          int b = integer(c.get("block"), c.key("block"));
          if (b < 0 || static_cast<std::size_t>(b) >= c.eco().size()) bad(c.key("block"), "block out of range");
          BudgetResult r = budget_max(c.eco(), static_cast<std::size_t>(b), vec(c.get("price"), c.key("price")));
          c.value("bounded", r.bounded ? 1.0 : 0.0);
          if (r.bounded) {
            c.value("value", r.value);
            c.vector("x", r.bundle);
          }
          c.out.detail = r.bounded ? "budget optimum" : "utility is unbounded on the budget set";
        }}},
      {"walras",
       {"economy walras", "walras-equilibrium", {"allocation", "price"}, [](const Call& c) {
          Allocation f = c.allocation();
          Vector p;
          if (c.has("price")) {
            p = vec(c.params["price"], c.key("price"));
          } else {
            LcWalrasResult lw = lc_to_walras(c.eco(), f, c.grid());
            if (lw.status != Status::pass && lw.price.empty()) {
              c.out.status = Status::fail;
              c.out.detail = "no candidate price: " + lw.detail;
              c.witness("X", Region::full(c.eco().capacity().universe()));
              return;
            }
            p = lw.price;
          }
          WalrasCertificate w = walras_check(c.eco(), f, p);
          c.vector("price", p);
          c.value("feasibility_residual", w.feasibility_residual);
          for (std::size_t i = 0; i < w.bundles.size(); ++i) {
            std::string b = std::to_string(i);
            c.value("budget_slack_" + b, w.budget_slack[i]);
            c.value("optimum_" + b, w.optimum[i]);
            if (!std::isnan(w.utility[i])) c.value("utility_" + b, w.utility[i]);
            c.value("gap_" + b, w.gap[i]);
          }
          c.out.status = w.status;
          c.out.detail = w.detail;
          if (!w.passed()) {
            std::optional<std::size_t> worst;
            for (std::size_t i = 0; i < w.bundles.size() && !worst; ++i) {
              if (w.budget_slack[i] < -1e-9 || w.gap[i] > 1e-9 || std::isnan(w.utility[i])) worst = i;
            }
            c.witness(worst ? "E_" + std::to_string(*worst) : "X", block_or_all(c.eco(), worst));
          }
        }}},
      {"lc-walras",
       {"economy walras", "large-core-to-walras", {"allocation"}, [](const Call& c) {
          Allocation f = c.allocation();
          LcWalrasResult r = lc_to_walras(c.eco(), f, c.grid());
          c.out.status = r.status;
          c.out.detail = r.detail;
          if (r.strong_check.improved) {
            Verdict v = verify_improvement(c.eco(), f, r.strong_check, ImprovementMode::strong);
            for (const auto& [k, reg] : v.witness) c.witness(k, reg);
            return;
          }
          if (!r.separation.has_price) {
            c.vector("witness", r.separation.witness);
            c.witness("X", Region::full(c.eco().capacity().universe()));
            return;
          }
          c.vector("price", r.price);
          c.value("price_from_gradient", r.price_from_gradient ? 1.0 : 0.0);
          if (!r.price_from_gradient && r.separation.exact) {
            for (std::size_t j = 0; j < r.separation.exact_price.size(); ++j) {
              c.out.exact.emplace_back("price[" + std::to_string(j) + "]", to_string(r.separation.exact_price[j]));
            }
          }
          for (std::size_t i = 0; i < r.gamma.gamma.size(); ++i) c.value("gamma_" + std::to_string(i), r.gamma.gamma[i]);
          for (std::size_t i = 0; i < r.value_gap.size(); ++i) c.value("value_gap_" + std::to_string(i), r.value_gap[i]);
          if (r.status != Status::pass) c.witness("X", Region::full(c.eco().capacity().universe()));
        }}},
      {"oracle",
       {"economy oracle", "core-improvement-search", {"allocation", "mode", "grid"}, [](const Call& c) {
          std::string m = c.has("mode") ? str(c.params["mode"], c.key("mode")) : "weak";
          if (m != "weak" && m != "strong") bad(c.key("mode"), "expected \"weak\" or \"strong\"");
          ImprovementMode mode = m == "weak" ? ImprovementMode::weak : ImprovementMode::strong;
          Allocation f = c.allocation();
          int grid = c.grid();
          CoreVerdict v = improvement_oracle(c.eco(), f, mode, grid);
          c.value("grid", grid);
          c.value("coalitions_tested", static_cast<double>(v.coalitions_tested));
          c.out.detail = v.detail;
          if (!v.improved) return;
          Verdict check = verify_improvement(c.eco(), f, v, mode);
          c.out.status = Status::fail;
          c.vector("coalition_mass", v.masses);
          for (std::size_t i = 0; i < v.bundles.size(); ++i) {
            if (v.masses[i] > 0.0) c.vector("g_" + std::to_string(i), v.bundles[i]);
          }
          c.value("on_grid", v.on_grid ? 1.0 : 0.0);
          c.value("verified", check.passed() ? 1.0 : 0.0);
          for (const auto& [k, r] : check.witness) c.witness(k, r);
          if (!check.passed()) c.out.detail += "; re-verification failed: " + check.detail;
        }}},
      {"core-check",
       {"economy core-check", "simple-core-criterion", {"allocation"}, [](const Call& c) {
          c.take(core_check_simple(c.eco(), c.allocation()));
        }}},
      {"characterize",
       {"economy characterize", "core-walras-equivalence", {"seed"}, [](const Call& c) {
          CoreCharacterization r = characterize_core(c.eco(), c.seed());
          c.out.seed = c.seed();
          c.out.status = r.status;
          c.out.detail = r.description;
          c.value("unique", r.unique ? 1.0 : 0.0);
          c.value("members", static_cast<double>(r.members.size()));
          c.vector("price", r.price);
          c.value("members_certified", static_cast<double>(r.members_certified));
          c.value("nonmembers_tested", static_cast<double>(r.nonmembers_tested));
          c.value("nonmembers_rejected", static_cast<double>(r.nonmembers_rejected));
          for (std::size_t m = 0; m < std::min<std::size_t>(r.members.size(), 4); ++m) {
            for (std::size_t i = 0; i < r.members[m].size(); ++i) {
              c.vector("member_" + std::to_string(m) + ".w_" + std::to_string(i), r.members[m][i]);
            }
          }
          if (r.status != Status::pass) c.witness("X", Region::full(c.eco().capacity().universe()));
        }}},
  };
  return ops;
}

struct Default {
  const char* op;
  const char* params;
};

std::vector<Default> defaults_for(const std::string& command) {
  if (command == "capacity check") {
    return {{"property", R"({"property":"monotone"})"},
            {"property", R"({"property":"subadditive"})"},
            {"property", R"({"property":"submodular"})"},
            {"property", R"({"property":"zero_sets_union_stable"})"}};
  }
  if (command == "capacity split") return {{"split", R"({"region":"full","t":0.5})"}};
  if (command == "choquet integrate") return {{"integrate", "{}"}, {"conjugate_duality", "{}"}};
  if (command == "choquet jensen") return {{"jensen", "{}"}};
  if (command == "economy core-check") return {{"feasibility", "{}"}, {"core-check", "{}"}};
  if (command == "economy walras") return {{"walras", "{}"}};
  if (command == "economy characterize") return {{"characterize", "{}"}};
  if (command == "economy oracle") return {{"oracle", R"({"mode":"weak"})"}, {"oracle", R"({"mode":"strong"})"}};
  fail(ErrorCode::invalid_argument, "unknown command \"" + command + "\"");
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ojson number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return std::stod(format_number(v));
}

}  // namespace

// ---- public ----

Capacity parse_capacity(std::string_view text) { return capacity_of(parse_text(text, "capacity"), ""); }

Region parse_region(std::string_view text, const Universe& u) { return region_of(parse_text(text, "region"), "", u); }

Economy parse_economy(std::string_view text) { return economy_of(parse_text(text, "economy"), ""); }

int exit_code_for(const Error& e) { return e.code() == ErrorCode::internal_invariant ? 3 : 2; }

int Report::exit_code() const {
  for (const auto& c : checks) {
    if (c.status != Status::pass) return 1;
  }
  return 0;
}

std::string Report::to_json(bool indent) const {
  ojson root;
  root["version"] = format_version;
  if (!description.empty()) root["description"] = description;
  ojson list = ojson::array();
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& c : checks) {
    ojson item;
    item["name"] = c.name;
    item["op"] = c.op;
    item["verdict"] = c.status == Status::pass ? "PASS" : c.status == Status::fail ? "FAIL" : "INCONCLUSIVE";
    item["tag"] = c.tag;
    item["detail"] = c.detail;
    ojson values = ojson::object();
    for (const auto& [k, v] : c.values) values[k] = number_json(v);
    item["values"] = values;
    if (!c.exact.empty()) {
      ojson ex = ojson::object();
      for (const auto& [k, v] : c.exact) ex[k] = v;
      item["exact"] = ex;
    }
    if (!c.witness.empty()) {
      ojson w = ojson::object();
      for (const auto& [k, v] : c.witness) w[k] = v;
      item["witness"] = w;
    }
    if (c.seed) item["seed"] = *c.seed;
    item["elapsed_ms"] = number_json(c.elapsed_ms);
    list.push_back(item);
    ++counts[static_cast<int>(c.status)];
  }
  root["checks"] = list;
  root["summary"] = {{"total", checks.size()}, {"pass", counts[0]}, {"fail", counts[1]}, {"inconclusive", counts[2]}};
  root["exit_code"] = exit_code();
  return root.dump(indent ? 2 : -1);
}

std::string Report::to_text() const {
  std::ostringstream os;
  if (!description.empty()) os << description << "\n";
  std::size_t pass = 0;
  for (const auto& c : checks) {
    const char* verdict = c.status == Status::pass ? "PASS" : c.status == Status::fail ? "FAIL" : "INCONCLUSIVE";
    if (c.status == Status::pass) ++pass;
    os << verdict << "  " << c.name << "  [" << c.tag << "]  " << c.detail << "\n";
    for (const auto& [k, v] : c.values) os << "    " << k << " = " << format_number(v) << "\n";
    for (const auto& [k, v] : c.exact) os << "    " << k << " = " << v << " (exact)\n";
    for (const auto& [k, v] : c.witness) os << "    witness " << k << " = " << v << "\n";
    if (c.seed) os << "    seed = " << *c.seed << "\n";
  }
  os << pass << "/" << checks.size() << " checks passed\n";
  return os.str();
}

Report run(std::string_view text, const Options& opts, const Filter& filter) {
  json root = parse_text(text, "scenario");
  allow(root, "", {"version", "description", "seed", "grid", "tol", "capacity", "function", "economy", "checks"});
  if (root.contains("version") && str(root["version"], "/version") != format_version) {
    bad("/version", "unsupported version (expected \"" + std::string(format_version) + "\")");
  }
  Report report;
  if (root.contains("description")) report.description = str(root["description"], "/description");

  Context ctx;
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) bad("/seed", "expected a nonnegative integer");
    ctx.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("grid")) ctx.grid = integer(root["grid"], "/grid");
  if (root.contains("tol")) ctx.tol = num(root["tol"], "/tol");
  if (opts.seed) ctx.seed = *opts.seed;
  if (opts.grid) ctx.grid = *opts.grid;
  if (opts.tol) ctx.tol = *opts.tol;
  if (ctx.grid < 1) bad("/grid", "grid must be positive");
  if (!(ctx.tol >= 0.0)) bad("/tol", "tolerance must be nonnegative");

  if (root.contains("capacity")) ctx.mu = capacity_of(root["capacity"], "/capacity");
  if (root.contains("economy")) {
    ctx.eco = economy_of(root["economy"], "/economy");
    if (!ctx.mu) ctx.mu = ctx.eco->capacity();
  }
  if (root.contains("function")) {
    Universe u = ctx.mu ? ctx.mu->universe() : Universe::square();
    ctx.f = function_of(root["function"], "/function", u);
  }

  // Checks to run: (op, params, pointer path).
  std::vector<std::tuple<std::string, json, std::string>> todo;
  if (root.contains("checks")) {
    const json& cs = root["checks"];
    if (!cs.is_array()) bad("/checks", "expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      std::string p = at("/checks", i);
      if (!cs[i].is_object()) bad(p, "expected an object");
      std::string op = str(need(cs[i], p, "op"), at(p, "op"));
      auto it = registry().find(op);
      if (it == registry().end()) bad(at(p, "op"), "unknown check \"" + op + "\"");
      if (!filter.command.empty() && filter.command != it->second.command) continue;
      todo.emplace_back(op, cs[i], p);
    }
  }
  if (!filter.command.empty() && todo.empty()) {
    for (const auto& d : defaults_for(filter.command)) todo.emplace_back(d.op, json::parse(d.params), "/defaults");
  }

  for (auto& [op, params, path] : todo) {
    const OpSpec& spec = registry().at(op);
    std::vector<const char*> keys{"op", "name"};
    keys.insert(keys.end(), spec.params.begin(), spec.params.end());
    if (!params.is_object()) bad(path, "expected an object");
    for (const auto& [k, v] : params.items()) {
      if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) == keys.end()) {
        bad(at(path, k), "unknown field for check \"" + op + "\"");
      }
    }
    CheckResult res;
    res.op = op;
    res.tag = spec.tag;
    res.name = params.contains("name") ? str(params["name"], at(path, "name")) : op;
    auto start = std::chrono::steady_clock::now();
    spec.run(Call{params, path, ctx, res});
    res.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (res.status == Status::fail && res.witness.empty()) {
      fail(ErrorCode::internal_invariant, "check \"" + res.name + "\" failed without a witness");
    }
    report.checks.push_back(std::move(res));
  }
  return report;
}

// ---- demos ----

namespace {

const std::vector<std::pair<std::string, std::string>>& demos() {
  static const std::vector<std::pair<std::string, std::string>> list = {
      {"example-1-1", R"({
  "version": "1",
  "description": "square-root section capacity on the unit square: submodularity and exact splitting",
  "capacity": {"kind": "product_section", "gamma": "sqrt"},
  "checks": [
    {"op": "property", "property": "monotone", "samples": 1000},
    {"op": "property", "property": "submodular", "samples": 1000},
    {"op": "property", "property": "subadditive", "samples": 1000},
    {"op": "submodular_pair", "name": "overlapping-strips",
     "a": {"rects": [["0", "1/2", "0", "1"]]}, "b": {"rects": [["1/4", "3/4", "0", "1"]]}},
    {"op": "half_subset", "name": "half-of-square", "region": "full"},
    {"op": "split", "name": "split-square", "region": "full", "t": 0.5},
    {"op": "split", "name": "split-staircase",
     "region": {"rects": [["0", "1/2", "0", "1/2"], ["1/4", "1", "1/2", "1"]]}, "t": 0.3}
  ]
})"},
      {"collinear-core", R"({
  "version": "1",
  "description": "two blocks with collinear endowments and common utility sqrt(x1 x2): the core is the endowment",
  "economy": {
    "blocks": [
      {"mass": 1, "endowment": [1, 1], "preference": {"kind": "cobb_douglas", "alpha": [0.5, 0.5]}},
      {"mass": 1, "endowment": [2, 2], "preference": {"kind": "cobb_douglas", "alpha": [0.5, 0.5]}}
    ],
    "capacity_per_block": {"kind": "product_section", "gamma": "sqrt"}
  },
  "checks": [
    {"op": "feasibility"},
    {"op": "core-check"},
    {"op": "walras", "price": [0.5, 0.5]},
    {"op": "lc-walras"},
    {"op": "characterize"},
    {"op": "oracle", "mode": "weak", "grid": 16},
    {"op": "oracle", "mode": "strong", "grid": 16}
  ]
})"},
      {"coordinate-list", R"({
  "version": "1",
  "description": "coordinate-list preferences sharing commodity 2: the endowment is an equilibrium",
  "economy": {
    "blocks": [
      {"mass": 1, "endowment": [1, 2, 1], "preference": {"kind": "coordinate_list", "coords": [1, 2]}},
      {"mass": 2, "endowment": [2, 1, 3], "preference": {"kind": "coordinate_list", "coords": [2, 3]}}
    ]
  },
  "checks": [
    {"op": "feasibility"},
    {"op": "walras", "price": [0, 1, 0]},
    {"op": "lc-walras"},
    {"op": "oracle", "mode": "strong"}
  ]
})"},
  };
  return list;
}

}  // namespace

std::vector<std::string> demo_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : demos()) out.push_back(k);
  return out;
}

std::string demo_scenario(const std::string& name) {
  for (const auto& [k, v] : demos()) {
    if (k == name) return v;
  }
  std::string names;
  for (const auto& [k, v] : demos()) names += (names.empty() ? "" : ", ") + k;
  fail(ErrorCode::invalid_argument, "unknown demo \"" + name + "\"; available: " + names);
}

}  // namespace choquet::scenario
