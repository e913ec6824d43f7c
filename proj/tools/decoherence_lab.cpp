#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "decoherence/errors.hpp"
#include "decoherence/scenario.hpp"

namespace {

using decoherence::cli::Json;

int report(const char* kind, const std::string& message, int code) {
  Json error = Json::object();
  error["error"] = kind;
  error["message"] = message;
  std::cerr << error.dump() << '\n';
  return code;
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path + "'");
  }
  out << bytes;
  if (!out.flush()) {
    throw std::runtime_error("failed writing output file '" + path + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = decoherence::cli;

  std::string scenario;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  std::string format_name;
  std::optional<std::uint64_t> seed;

  std::string names;
  for (const std::string& name : cli::scenario_names()) {
    names += (names.empty() ? "" : ", ") + name;
  }

  CLI::App app{"Decoherence model scenarios as CSV/JSON tables"};
  app.add_option("scenario", scenario, "one of: " + names)->required();
  app.add_option("--config", config_path, "JSON scenario config");
  app.add_option("--set", overrides, "override one parameter, key=value")->take_all();
  app.add_option("--out", out_path, "output path, '-' for stdout");
  app.add_option("--format", format_name, "csv or json");
  app.add_option("--seed", seed, "master seed for stochastic scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("validation", e.what(), cli::kExitValidation);
  }

  try {
    cli::ScenarioConfig config =
        config_path.empty() ? cli::parse_config(scenario, "{}") : cli::load_config(scenario, config_path);
    for (const std::string& assignment : overrides) {
      cli::apply_override(config, assignment);
    }
    if (!out_path.empty()) {
      config.output_path = out_path;
    }
    if (!format_name.empty()) {
      config.format = decoherence::parse_table_format(format_name);
    }
    if (seed) {
      config.seed = seed;
    }
    const cli::ScenarioOutput output = cli::run_scenario(config);
    write_output(config.output_path, cli::render_output(output, config.format));
    return cli::kExitSuccess;
  } catch (const decoherence::ArgumentError& e) {
    return report("validation", e.what(), cli::kExitValidation);
  } catch (const decoherence::NumericalError& e) {
    return report("numerical", e.what(), cli::kExitNumerical);
  } catch (const std::exception& e) {
    return report("internal", e.what(), 1);
  }
}
