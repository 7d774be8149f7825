#include "choquet/choquet_c.h"

#include "choquet/economy.hpp"
#include "choquet/error.hpp"
#include "choquet/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <string>

struct chq_capacity {
  choquet::Capacity mu;
};

struct chq_economy {
  choquet::Economy eco;
};

namespace {

thread_local std::string last_error;

chq_status status_of(choquet::ErrorCode c) {
  using choquet::ErrorCode;
  switch (c) {
    case ErrorCode::invalid_argument: return CHQ_E_INVALID_ARGUMENT;
    case ErrorCode::parse: return CHQ_E_PARSE;
    case ErrorCode::universe_mismatch: return CHQ_E_UNIVERSE_MISMATCH;
    case ErrorCode::domain: return CHQ_E_DOMAIN;
    case ErrorCode::unsupported_capacity: return CHQ_E_UNSUPPORTED;
    case ErrorCode::precondition: return CHQ_E_PRECONDITION;
    case ErrorCode::malformed_utility: return CHQ_E_MALFORMED_UTILITY;
    case ErrorCode::division: return CHQ_E_DIVISION;
    case ErrorCode::internal_invariant: return CHQ_E_INTERNAL;
  }
  return CHQ_E_INTERNAL;
}

template <class F>
chq_status guard(F&& fn) {
  try {
    last_error.clear();
    fn();
    return CHQ_OK;
  } catch (const choquet::Error& e) {
    last_error = std::string(choquet::to_string(e.code())) + ": " + e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CHQ_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = std::string("internal error: ") + e.what();
    return CHQ_E_INTERNAL;
  } catch (...) {
    last_error = "unknown internal error";
    return CHQ_E_INTERNAL;
  }
}

chq_status null_arg(const char* what) {
  last_error = std::string("null argument: ") + what;
  return CHQ_E_NULL_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

choquet::scenario::Options options_of(const chq_options* o) {
  choquet::scenario::Options out;
  if (!o) return out;
  if (o->has_seed) out.seed = o->seed;
  if (o->grid > 0) out.grid = o->grid;
  if (o->tol >= 0.0) out.tol = o->tol;
  return out;
}

std::vector<choquet::Vector> rows(const choquet::Economy& eco, const double* bundles) {
  std::vector<choquet::Vector> out;
  for (std::size_t i = 0; i < eco.size(); ++i) out.emplace_back(bundles + i * eco.dim(), bundles + (i + 1) * eco.dim());
  return out;
}

}  // namespace

extern "C" {

const char* chq_version(void) { return "1.0.0"; }

const char* chq_last_error(void) { return last_error.c_str(); }

const char* chq_status_name(chq_status s) {
  switch (s) {
    case CHQ_OK: return "ok";
    case CHQ_E_INVALID_ARGUMENT: return "invalid-argument";
    case CHQ_E_PARSE: return "parse-error";
    case CHQ_E_UNIVERSE_MISMATCH: return "universe-mismatch";
    case CHQ_E_DOMAIN: return "domain-error";
    case CHQ_E_UNSUPPORTED: return "unsupported-capacity";
    case CHQ_E_PRECONDITION: return "precondition-error";
    case CHQ_E_MALFORMED_UTILITY: return "malformed-utility";
    case CHQ_E_DIVISION: return "division-error";
    case CHQ_E_INTERNAL: return "internal-invariant";
    case CHQ_E_NULL_ARGUMENT: return "null-argument";
  }
  return "unknown";
}

void chq_options_init(chq_options* opts) {
  if (!opts) return;
  opts->has_seed = 0;
  opts->seed = 0;
  opts->grid = 0;
  opts->tol = -1.0;
  opts->pretty = 0;
}

void chq_string_free(char* s) { std::free(s); }

int chq_status_exit_code(chq_status s) {
  if (s == CHQ_OK) return 0;
  return s == CHQ_E_INTERNAL ? 3 : 2;
}

chq_status chq_run_scenario(const char* scenario_json, const chq_options* opts, const char* command, char** report,
                            int* exit_code) {
  if (!scenario_json) return null_arg("scenario_json");
  if (!report || !exit_code) return null_arg("report/exit_code");
  *report = nullptr;
  return guard([&] {
    choquet::scenario::Filter filter;
    if (command) filter.command = command;
    auto r = choquet::scenario::run(scenario_json, options_of(opts), filter);
    bool pretty = opts && opts->pretty;
    *report = copy_string(pretty ? r.to_text() : r.to_json());
    *exit_code = r.exit_code();
  });
}

chq_status chq_run_demo(const char* name, const chq_options* opts, char** report, int* exit_code) {
  if (!name) return null_arg("name");
  if (!report || !exit_code) return null_arg("report/exit_code");
  std::string text;
  chq_status s = guard([&] { text = choquet::scenario::demo_scenario(name); });
  if (s != CHQ_OK) return s;
  return chq_run_scenario(text.c_str(), opts, nullptr, report, exit_code);
}

chq_status chq_demo_list(char** names) {
  if (!names) return null_arg("names");
  return guard([&] {
    std::string out;
    for (const auto& n : choquet::scenario::demo_names()) out += n + "\n";
    *names = copy_string(out);
  });
}

chq_status chq_capacity_from_json(const char* json, chq_capacity** out) {
  if (!json || !out) return null_arg("json/out");
  *out = nullptr;
  return guard([&] { *out = new chq_capacity{choquet::scenario::parse_capacity(json)}; });
}

void chq_capacity_free(chq_capacity* mu) { delete mu; }

chq_status chq_capacity_total(const chq_capacity* mu, double* out) {
  if (!mu || !out) return null_arg("mu/out");
  return guard([&] { *out = mu->mu.total_mass(); });
}

chq_status chq_capacity_evaluate(const chq_capacity* mu, const char* region_json, double* out) {
  if (!mu || !region_json || !out) return null_arg("mu/region_json/out");
  return guard([&] { *out = mu->mu(choquet::scenario::parse_region(region_json, mu->mu.universe())); });
}

chq_status chq_capacity_check(const chq_capacity* mu, const char* property, uint64_t seed, size_t samples, double tol,
                              int* passed) {
  if (!mu || !property || !passed) return null_arg("mu/property/passed");
  return guard([&] {
    using choquet::Property;
    std::string p = property;
    std::optional<Property> prop;
    for (Property q : {Property::monotone, Property::subadditive, Property::submodular, Property::zero_sets_union_stable}) {
      if (p == choquet::to_string(q)) prop = q;
    }
    if (!prop) choquet::fail(choquet::ErrorCode::invalid_argument, "unknown property \"" + p + "\"");
    choquet::CheckOptions o;
    o.seed = seed;
    o.samples = samples;
    o.tol = tol;
    *passed = choquet::check_property(mu->mu, *prop, o).passed() ? 1 : 0;
  });
}

chq_status chq_economy_from_json(const char* json, chq_economy** out) {
  if (!json || !out) return null_arg("json/out");
  *out = nullptr;
  return guard([&] { *out = new chq_economy{choquet::scenario::parse_economy(json)}; });
}

void chq_economy_free(chq_economy* eco) { delete eco; }

chq_status chq_economy_shape(const chq_economy* eco, size_t* blocks, size_t* commodities) {
  if (!eco || !blocks || !commodities) return null_arg("eco/blocks/commodities");
  *blocks = eco->eco.size();
  *commodities = eco->eco.dim();
  return CHQ_OK;
}

chq_status chq_economy_feasible(const chq_economy* eco, const double* bundles, int* feasible) {
  if (!eco || !bundles || !feasible) return null_arg("eco/bundles/feasible");
  return guard([&] {
    *feasible = choquet::feasibility(eco->eco, eco->eco.simple(rows(eco->eco, bundles))).passed() ? 1 : 0;
  });
}

chq_status chq_economy_core_check(const chq_economy* eco, const double* bundles, int* in_core) {
  if (!eco || !bundles || !in_core) return null_arg("eco/bundles/in_core");
  return guard([&] {
    *in_core = choquet::core_check_simple(eco->eco, eco->eco.simple(rows(eco->eco, bundles))).passed() ? 1 : 0;
  });
}

chq_status chq_economy_walras(const chq_economy* eco, const double* bundles, const double* price, double* price_out,
                              int* passed) {
  if (!eco || !bundles || !passed) return null_arg("eco/bundles/passed");
  return guard([&] {
    const auto& e = eco->eco;
    choquet::Allocation f = e.simple(rows(e, bundles));
    choquet::Vector p;
    if (price) {
      p.assign(price, price + e.dim());
    } else {
      auto lw = choquet::lc_to_walras(e, f);
      if (lw.price.empty()) {
        *passed = 0;
        return;
      }
      p = lw.price;
    }
    if (price_out) std::copy(p.begin(), p.end(), price_out);
    *passed = choquet::walras_check(e, f, p).passed() ? 1 : 0;
  });
}

chq_status chq_economy_oracle(const chq_economy* eco, const double* bundles, int strong, int grid, int* improved,
                              double* masses_out) {
  if (!eco || !bundles || !improved) return null_arg("eco/bundles/improved");
  return guard([&] {
    const auto& e = eco->eco;
    auto mode = strong ? choquet::ImprovementMode::strong : choquet::ImprovementMode::weak;
    auto v = choquet::improvement_oracle(e, e.simple(rows(e, bundles)), mode, grid);
    *improved = v.improved ? 1 : 0;
    if (masses_out) std::copy(v.masses.begin(), v.masses.end(), masses_out);
  });
}

}  // extern "C"
