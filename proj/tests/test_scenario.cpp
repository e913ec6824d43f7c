#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "decoherence/cavity_qed.hpp"
#include "decoherence/errors.hpp"
#include "decoherence/scenario.hpp"

using namespace decoherence;
using namespace decoherence::cli;

namespace {

ScenarioConfig config_for(const std::string& scenario, const std::vector<std::string>& overrides = {}) {
  ScenarioConfig c = parse_config(scenario, "{}");
  for (const auto& o : overrides) {
    apply_override(c, o);
  }
  return c;
}

double real_cell(const Cell& c) { return std::get<double>(c); }

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t k = 0; k < t.columns.size(); ++k) {
    if (t.columns[k] == name) return k;
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_CASE("every scenario runs and records an equation label") {
  const std::map<std::string, std::vector<std::string>> small{
      {"cavity-spectrum", {"points=200"}},
      {"cavity-cat", {}},
      {"lindblad-evolve", {"n_max=6", "n0=3", "points=11"}},
      {"qsd-compare", {"trajectories=20", "points=4"}},
      {"kaon-asymmetry", {"points=20"}},
      {"kaon-scan", {"alpha_points=2", "gamma_points=2"}},
      {"foam-estimate", {}}};
  CHECK(small.size() == scenario_names().size());
  for (const auto& [name, overrides] : small) {
    const ScenarioOutput out = run_scenario(config_for(name, overrides));
    CHECK(!out.equations.empty());
    CHECK(!out.table.rows.empty());
    for (const ParamSpec& spec : scenario_parameters(name)) {
      CHECK(out.parameters.contains(spec.name));
    }
    const std::string csv = render_output(out, TableFormat::Csv);
    CHECK(csv.rfind("# scenario: " + name + "\n# equations: ", 0) == 0);
    const Json json = Json::parse(render_output(out, TableFormat::Json));
    CHECK(json["metadata"]["scenario"] == name);
    CHECK(json["records"].size() == out.table.rows.size());
  }
}

TEST_CASE("config schema") {
  CHECK_THROWS_AS(parse_config("nope", "{}"), ValidationError);
  CHECK_THROWS_AS(parse_config("foam-estimate", "{\"extra\": 1}"), ValidationError);
  CHECK_THROWS_AS(parse_config("foam-estimate", "{\"parameters\": {\"bogus\": 1}}"), ValidationError);
  CHECK_THROWS_AS(parse_config("foam-estimate", "{\"parameters\": {\"n_decades\": 1.5}}"), ValidationError);
  CHECK_THROWS_AS(parse_config("foam-estimate", "{\"parameters\": {\"particle_mass\": \"heavy\"}}"), ValidationError);
  CHECK_THROWS_AS(parse_config("foam-estimate", "{\"scenario\": \"kaon-scan\"}"), ValidationError);
  CHECK_THROWS_AS(parse_config("foam-estimate", "{\"seed\": -1}"), ValidationError);
  CHECK_THROWS_AS(parse_config("foam-estimate", "{\"output\": {\"format\": \"xml\"}}"), ValidationError);
  CHECK_THROWS_AS(parse_config("foam-estimate", "[1, 2"), ValidationError);

  const ScenarioConfig c = parse_config(
      "qsd-compare",
      R"({"scenario": "qsd-compare", "seed": 12, "parameters": {"trajectories": 10},
          "output": {"path": "x.json", "format": "json"}})");
  CHECK(c.seed == 12u);
  CHECK(c.output_path == "x.json");
  CHECK(c.format == TableFormat::Json);
  CHECK(c.parameters["trajectories"] == 10);
}

TEST_CASE("overrides") {
  ScenarioConfig c = config_for("lindblad-evolve");
  apply_override(c, "model=qubit-decay");
  apply_override(c, "kappa=0.5");
  apply_override(c, "points=3");
  CHECK(c.parameters["model"] == "qubit-decay");
  CHECK(c.parameters["kappa"] == 0.5);
  CHECK_THROWS_AS(apply_override(c, "nonsense"), ValidationError);
  CHECK_THROWS_AS(apply_override(c, "=3"), ValidationError);
  CHECK_THROWS_AS(apply_override(c, "unknown=3"), ValidationError);
  const ScenarioOutput out = run_scenario(c);
  const auto& last = out.table.rows.back();
  CHECK(std::abs(real_cell(last[column(out.table, "observable")]) - std::exp(-3.0)) < 1e-10);
}

TEST_CASE("parameters are validated before running") {
  CHECK_THROWS_AS(run_scenario(config_for("kaon-asymmetry", {"alpha=1e-17", "beta=1e-15", "gamma=1e-17"})),
                  ArgumentError);
  CHECK_THROWS_AS(run_scenario(config_for("kaon-asymmetry", {"time_unit=years"})), ValidationError);
  CHECK_THROWS_AS(run_scenario(config_for("qsd-compare", {"dt=0.01"})), ValidationError);
  CHECK_THROWS_AS(run_scenario(config_for("cavity-cat", {"phi=0.1", "t_int_us=10"})), ValidationError);
  CHECK_THROWS_AS(run_scenario(config_for("cavity-spectrum", {"lambda_khz=0"})), ValidationError);
  CHECK_THROWS_AS(run_scenario(config_for("lindblad-evolve", {"model=other"})), ValidationError);
  CHECK_THROWS_AS(run_scenario(config_for("lindblad-evolve", {"method=euler"})), ValidationError);
  CHECK_THROWS_AS(run_scenario(config_for("foam-estimate", {"particle_mass=-1"})), ValidationError);
  CHECK_THROWS_AS(run_scenario(config_for("cavity-cat", {"photons_max=10", "fock_cutoff=3"})), ArgumentError);
}

TEST_CASE("kaon asymmetry contract") {
  const ScenarioOutput out = run_scenario(config_for("kaon-asymmetry"));
  CHECK(out.table.columns == std::vector<std::string>{"t_over_tau_s", "a_2pi", "a_dm", "trace", "purity", "entropy"});
  CHECK(out.table.rows.size() == 400);
  CHECK(real_cell(out.table.rows.front()[2]) == -1.0);
  CHECK(std::abs(real_cell(out.table.rows.back()[0]) - 20.0) < 1e-12);
  CHECK(out.parameters["alpha"] == 4.0e-17);
}

TEST_CASE("kaon time in seconds") {
  const ScenarioOutput out = run_scenario(config_for("kaon-asymmetry", {"time_unit=s", "t_max=1e-9", "points=3"}));
  const double expected = 1e-9 / 6.582e-25 * 7.351e-15;
  CHECK(std::abs(real_cell(out.table.rows.back()[0]) / expected - 1.0) < 1e-12);
}

TEST_CASE("resonant spectrum peaks at omega0 plus or minus lambda") {
  const ScenarioOutput out = run_scenario(config_for("cavity-spectrum"));
  const Table& t = out.table;
  REQUIRE(t.rows.size() == 10000);
  const double step = real_cell(t.rows[1][0]) - real_cell(t.rows[0][0]);
  std::size_t lo = 0, hi = t.rows.size() / 2;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const double v = real_cell(t.rows[k][2]);
    if (k < t.rows.size() / 2 && v > real_cell(t.rows[lo][2])) lo = k;
    if (k >= t.rows.size() / 2 && v > real_cell(t.rows[hi][2])) hi = k;
  }
  const double omega0 = 51099000.0;
  CHECK(std::abs(real_cell(t.rows[lo][0]) - (omega0 - 24.0)) <= step);
  CHECK(std::abs(real_cell(t.rows[hi][0]) - (omega0 + 24.0)) <= step);
  CHECK(std::abs(out.derived["eigen_splitting_khz"].get<double>() / 48.0 - 1.0) < 1e-10);
}

TEST_CASE("cat scenario reaches the operating point") {
  const ScenarioOutput out = run_scenario(config_for("cavity-cat"));
  const auto& last = out.table.rows.back();
  CHECK(std::get<std::int64_t>(last[0]) == 10);
  CHECK(std::abs(real_cell(last[column(out.table, "t_decoh_over_t_r")]) - 0.24) < 1e-12);
  CHECK(std::holds_alternative<std::monostate>(out.table.rows.front()[column(out.table, "t_decoh_ms")]));

  const ScenarioOutput timed = run_scenario(config_for("cavity-cat", {"t_int_us=100", "photons_min=10"}));
  CHECK(std::abs(real_cell(timed.table.rows.front()[1]) - 51.70163909907774) < 1e-9);
}

TEST_CASE("output is byte-identical across reruns and worker counts") {
  const ScenarioConfig c = config_for("qsd-compare", {"trajectories=64", "points=6", "t_final=0.5"});
  ScenarioConfig seeded = c;
  seeded.seed = 77;
  RunOptions one, many;
  one.threads = 1;
  many.threads = 5;
  const std::string a = render_output(run_scenario(seeded, one), TableFormat::Csv);
  const std::string b = render_output(run_scenario(seeded, many), TableFormat::Csv);
  const std::string again = render_output(run_scenario(seeded, many), TableFormat::Csv);
  CHECK(a == b);
  CHECK(a == again);
  CHECK(a.find("# seed: 77\n") != std::string::npos);
  const std::string other = render_output(run_scenario(c, one), TableFormat::Csv);
  CHECK(other != a);

  const ScenarioConfig scan = config_for("kaon-scan", {"alpha_points=4", "gamma_points=3"});
  CHECK(render_output(run_scenario(scan, one), TableFormat::Json) ==
        render_output(run_scenario(scan, many), TableFormat::Json));
}

TEST_CASE("scan marks invalid points") {
  const ScenarioOutput out = run_scenario(config_for("kaon-scan", {"alpha_points=2", "gamma_points=2"}));
  REQUIRE(out.table.rows.size() == 4);
  // (0, 0) is the QM limit; (0, gamma) and (alpha, 0) violate positivity.
  CHECK(std::get<std::int64_t>(out.table.rows[0][3]) == 1);
  CHECK(std::get<std::int64_t>(out.table.rows[1][3]) == 0);
  CHECK(std::holds_alternative<std::monostate>(out.table.rows[1][4]));
  CHECK(std::get<std::int64_t>(out.table.rows[3][3]) == 1);
}

TEST_CASE("foam scenario sweeps particle number") {
  const ScenarioOutput out = run_scenario(config_for("foam-estimate"));
  REQUIRE(out.table.rows.size() == 24);
  const double first = real_cell(out.table.rows.front()[4]);
  const double last = real_cell(out.table.rows.back()[4]);
  CHECK(std::abs(last / first / 1e23 - 1.0) < 1e-12);
  CHECK(std::abs(out.derived["delta_h_magnitude_gev"].get<double>() - 2.03e-20) < 0.005e-20);
}
