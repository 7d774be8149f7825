// chq: batch front end over the C interface.

#include "choquet/choquet_c.h"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>

namespace {

bool read_input(const std::string& path, std::string& out) {
  if (path == "-") {
    out.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    return true;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

int emit(chq_status s, char* report, int code) {
  if (s != CHQ_OK) {
    std::cerr << "chq: " << chq_last_error() << "\n";
    return chq_status_exit_code(s);
  }
  std::cout << report;
  if (report[0] != '\0' && report[std::char_traits<char>::length(report) - 1] != '\n') std::cout << "\n";
  chq_string_free(report);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Capacities, Choquet integrals and exchange-economy checks"};
  app.require_subcommand(1);
  app.fallthrough();

  chq_options opts;
  chq_options_init(&opts);
  std::uint64_t seed = 0;
  bool pretty = false, as_json = false;
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized checks");
  app.add_option("--grid", opts.grid, "coalition mass grid for the improvement oracle")->check(CLI::PositiveNumber);
  app.add_option("--tol", opts.tol, "tolerance for floating comparisons")->check(CLI::NonNegativeNumber);
  app.add_flag("--pretty", pretty, "human-readable report");
  app.add_flag("--json", as_json, "JSON report (default)");

  std::string file, command;
  auto add_file_command = [&](CLI::App* parent, const std::string& name, const std::string& full, const std::string& help) {
    auto* sub = parent->add_subcommand(name, help);
    sub->add_option("scenario", file, "scenario JSON file ('-' for stdin)")->required();
    sub->callback([&command, full] { command = full; });
    return sub;
  };

  add_file_command(&app, "run", "", "run every check listed in a scenario");
  auto* cap = app.add_subcommand("capacity", "capacity checks")->require_subcommand(1);
  add_file_command(cap, "check", "capacity check", "property checks on the scenario capacity");
  add_file_command(cap, "split", "capacity split", "exact splits of regions");
  auto* chq = app.add_subcommand("choquet", "integral checks")->require_subcommand(1);
  add_file_command(chq, "integrate", "choquet integrate", "integrals of the scenario function");
  add_file_command(chq, "jensen", "choquet jensen", "Jensen inequality for a concave utility");
  auto* eco = app.add_subcommand("economy", "exchange-economy checks")->require_subcommand(1);
  add_file_command(eco, "core-check", "economy core-check", "feasibility and the simple core criterion");
  add_file_command(eco, "walras", "economy walras", "Walras certificates");
  add_file_command(eco, "characterize", "economy characterize", "describe the core");
  add_file_command(eco, "oracle", "economy oracle", "search for improving coalitions");

  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "run a bundled scenario ('list' shows the registry)");
  demo->add_option("name", demo_name, "demo name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*seed_opt) {
    opts.has_seed = 1;
    opts.seed = seed;
  }
  opts.pretty = pretty && !as_json ? 1 : 0;

  char* report = nullptr;
  int code = 0;
  if (demo->parsed()) {
    if (demo_name == "list") {
      chq_status s = chq_demo_list(&report);
      return emit(s, report, 0);
    }
    chq_status s = chq_run_demo(demo_name.c_str(), &opts, &report, &code);
    return emit(s, report, code);
  }

  std::string text;
  if (!read_input(file, text)) {
    std::cerr << "chq: cannot read " << file << "\n";
    return 2;
  }
  chq_status s = chq_run_scenario(text.c_str(), &opts, command.empty() ? nullptr : command.c_str(), &report, &code);
  return emit(s, report, code);
}
