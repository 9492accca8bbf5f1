// beable-lab: run Segalgebra beable scenarios from JSON files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "beable/scenario.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;
constexpr int kSuiteFailure = 4;

bool is_command(const std::string& s) {
  const auto& all = beable::scenario_commands();
  return std::find(all.begin(), all.end(), s) != all.end();
}

std::vector<beable::Index> parse_dims(const std::string& text) {
  std::vector<beable::Index> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || v < 1) throw beable::ValidationError("--dims: expected a comma-separated list of positive integers");
    dims.push_back(v);
  }
  if (dims.empty()) throw beable::ValidationError("--dims: empty list");
  return dims;
}

std::string scalar_text(const beable::OrderedJson& v) {
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v.get<double>());
    return buf;
  }
  return v.dump();
}

void print_summary(const beable::Report& rep, std::ostream& os) {
  const auto& p = rep.payload;
  os << "command: " << p["command"].get<std::string>() << "  seed: " << p["seed"].get<std::uint64_t>() << '\n';
  const auto& res = p["results"];
  if (res.contains("suites")) {
    for (const auto& s : res["suites"]) {
      os << (s["ok"].get<bool>() ? "  ok    " : "  FAIL  ") << s["name"].get<std::string>() << "  " << s["passed"]
         << "/" << s["trials"] << "  worst " << scalar_text(s["worst_residual"]) << " (tol "
         << scalar_text(s["tolerance"]) << ")";
      if (s.contains("first_failure")) os << "  first failure: " << s["first_failure"].get<std::string>();
      os << '\n';
    }
    os << (res["all_passed"].get<bool>() ? "all suites passed\n" : "some suites failed\n");
  } else {
    for (const auto& [key, value] : res.items()) {
      if (value.is_primitive() && !(key == "has_status" && res.contains("verdict")))
        os << "  " << key << ": " << scalar_text(value) << '\n';
    }
    if (res.contains("verdict")) {
      const auto& v = res["verdict"];
      os << "  has_status: " << v["has_status"].dump() << "  ideal_dim: " << v["ideal_dim"] << '\n';
      if (v.contains("decomposition")) {
        for (const auto& c : v["decomposition"]) os << "    weight " << scalar_text(c["weight"]) << '\n';
      }
      if (v.contains("witness_dispersion")) os << "  witness dispersion: " << scalar_text(v["witness_dispersion"]) << '\n';
    }
  }
  os << "residuals:";
  for (const auto& [key, value] : p["residuals"].items()) os << "  " << key << "=" << scalar_text(value);
  os << '\n';
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beable analysis for finite-dimensional Segalgebras"};
  std::vector<std::string> positional;
  std::string corpus, output, dims_text;
  beable::RunOptions opt;
  double tol_value = 0.0;
  int trials = 0;
  bool json = false;

  app.add_option("args", positional, "[command] [scenario.json]")->expected(0, 2);
  app.add_option("--corpus", corpus, "run a bundled scenario by name");
  app.add_option("--seed", opt.seed, "random seed")->capture_default_str();
  auto* tol_opt = app.add_option("--tol", tol_value, "override the membership, dispersion and family tolerances");
  app.add_option("--max-dim", opt.max_dim, "largest dimension accepted by verify-theorems")->capture_default_str();
  app.add_option("--dims", dims_text, "verify-theorems dimensions, e.g. 2,3,4");
  auto* trials_opt = app.add_option("--trials", trials, "verify-theorems trials per dimension");
  app.add_option("--output", output, "also write the JSON report to this file");
  app.add_flag("--json", json, "print the JSON report only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*tol_opt) opt.tol = tol_value;
    if (*trials_opt) {
      if (trials < 1) throw beable::ValidationError("--trials must be positive");
      opt.trials = trials;
    }
    if (!dims_text.empty()) opt.dims = parse_dims(dims_text);

    std::string command, path;
    for (const std::string& a : positional) {
      if (command.empty() && path.empty() && is_command(a)) command = a;
      else if (path.empty()) path = a;
      else throw beable::ValidationError("too many positional arguments");
    }
    if (!corpus.empty()) {
      if (!path.empty()) throw beable::ValidationError("give either --corpus or a scenario file, not both");
      path = std::string(BEABLE_CORPUS_DIR) + "/" + corpus + ".json";
    }

    beable::Json source;
    if (!path.empty()) {
      source = beable::load_json_file(path);
    } else if (command == "verify-theorems") {
      source = {{"command", "verify-theorems"}};
    } else {
      throw beable::ValidationError("no scenario given (use a scenario file, --corpus or verify-theorems)");
    }
    beable::Scenario sc = beable::Scenario::from_json(source);
    if (!command.empty()) sc.set_command(command);

    const beable::Report rep = beable::run_scenario(sc, opt);
    if (!output.empty()) {
      std::ofstream out(output);
      if (!out) throw beable::ValidationError("cannot write " + output);
      out << rep.full().dump(2) << '\n';
    }
    if (json) std::cout << rep.full().dump(2) << '\n';
    else print_summary(rep, std::cout);
    return rep.suites_failed ? kSuiteFailure : kOk;
  } catch (const beable::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const beable::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const beable::Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
}
