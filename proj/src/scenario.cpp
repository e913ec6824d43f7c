#include "decoherence/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "decoherence/cavity_qed.hpp"
#include "decoherence/core.hpp"
#include "decoherence/foam.hpp"
#include "decoherence/kaon.hpp"
#include "decoherence/lindblad.hpp"
#include "decoherence/operators.hpp"
#include "decoherence/parallel.hpp"
#include "decoherence/qsd.hpp"

namespace decoherence::cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool condition, const std::string& message) {
  if (!condition) {
    throw ValidationError(message);
  }
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = a;
    return out;
  }
  const double step = (b - a) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = a + step * static_cast<double>(k);
  }
  out.back() = b;
  return out;
}

Cell optional_cell(const std::optional<double>& v) {
  return v ? Cell(*v) : Cell(std::monostate{});
}

// Resolved parameter values with typed accessors.
class Params {
 public:
  Params(const std::string& scenario, const std::vector<ParamSpec>& specs, const Json& user) {
    require(user.is_object(), "parameters must be a JSON object");
    for (const ParamSpec& spec : specs) {
      values_[spec.name] = spec.default_value;
      kinds_[spec.name] = spec.kind;
    }
    for (const auto& item : user.items()) {
      const auto it = kinds_.find(item.key());
      require(it != kinds_.end(), "unknown parameter '" + item.key() + "' for scenario " + scenario);
      const Json& v = item.value();
      switch (it->second) {
        case ParamKind::Real:
          require(v.is_number() || v.is_null(), "parameter '" + item.key() + "' must be a number");
          if (v.is_number()) {
            require(std::isfinite(v.get<double>()), "parameter '" + item.key() + "' must be finite");
          }
          values_[item.key()] = v.is_number() ? Json(v.get<double>()) : v;
          break;
        case ParamKind::Integer:
          require(v.is_number_integer() || v.is_null(), "parameter '" + item.key() + "' must be an integer");
          values_[item.key()] = v;
          break;
        case ParamKind::Text:
          require(v.is_string() || v.is_null(), "parameter '" + item.key() + "' must be a string");
          values_[item.key()] = v;
          break;
      }
    }
    for (const ParamSpec& spec : specs) {
      order_.push_back(spec.name);
    }
  }

  bool is_set(const std::string& name) const { return !at(name).is_null(); }

  double real(const std::string& name) const {
    const Json& v = at(name);
    require(v.is_number(), "parameter '" + name + "' is required");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& name) const {
    const Json& v = at(name);
    require(v.is_number_integer(), "parameter '" + name + "' is required");
    return v.get<std::int64_t>();
  }

  std::size_t count(const std::string& name, std::int64_t minimum) const {
    const std::int64_t v = integer(name);
    require(v >= minimum, "parameter '" + name + "' must be >= " + std::to_string(minimum));
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& name) const {
    const Json& v = at(name);
    require(v.is_string(), "parameter '" + name + "' is required");
    return v.get<std::string>();
  }

  void resolve(const std::string& name, Json value) { values_.at(name) = std::move(value); }

  Json ordered() const {
    Json out = Json::object();
    for (const std::string& name : order_) {
      out[name] = values_.at(name);
    }
    return out;
  }

 private:
  const Json& at(const std::string& name) const { return values_.at(name); }

  std::map<std::string, Json> values_;
  std::map<std::string, ParamKind> kinds_;
  std::vector<std::string> order_;
};

ParamSpec real(std::string name, Json value) { return {std::move(name), ParamKind::Real, std::move(value)}; }
ParamSpec integer(std::string name, Json value) { return {std::move(name), ParamKind::Integer, std::move(value)}; }
ParamSpec text(std::string name, Json value) { return {std::move(name), ParamKind::Text, std::move(value)}; }

struct ScenarioDef {
  std::vector<std::string> equations;
  std::vector<ParamSpec> params;
  std::function<void(Params&, ScenarioOutput&, const ScenarioConfig&, const RunOptions&)> run;
};

// ---------------------------------------------------------------------------
// cavity-spectrum

void run_cavity_spectrum(Params& p, ScenarioOutput& out, const ScenarioConfig&, const RunOptions&) {
  const double omega0_khz = p.real("omega0_khz");
  const double detuning_khz = p.real("detuning_khz");
  const double lambda_khz = p.real("lambda_khz");
  const std::size_t n_atoms = p.count("n_atoms", 1);
  require(lambda_khz >= 0.0, "lambda_khz must be >= 0");
  const double collective_khz = lambda_khz * std::sqrt(static_cast<double>(n_atoms));
  if (!p.is_set("theta")) {
    p.resolve("theta", std::numbers::pi / 4.0);
  }
  if (!p.is_set("gamma_plus_khz")) {
    p.resolve("gamma_plus_khz", 0.02 * collective_khz);
  }
  if (!p.is_set("gamma_minus_khz")) {
    p.resolve("gamma_minus_khz", 0.02 * collective_khz);
  }
  const double gamma_plus_khz = p.real("gamma_plus_khz");
  const double gamma_minus_khz = p.real("gamma_minus_khz");
  require(gamma_plus_khz > 0.0 && gamma_minus_khz > 0.0, "gamma_plus_khz and gamma_minus_khz must be > 0");
  const std::size_t points = p.count("points", 2);
  require(points <= 10'000'000, "points must be <= 1e7");

  const double root_khz =
      std::sqrt(detuning_khz * detuning_khz + 4.0 * static_cast<double>(n_atoms) * lambda_khz * lambda_khz);
  if (!p.is_set("half_width_khz")) {
    p.resolve("half_width_khz", root_khz + 20.0 * std::max(gamma_plus_khz, gamma_minus_khz));
  }
  const double half_width_khz = p.real("half_width_khz");
  require(half_width_khz > 0.0, "half_width_khz must be > 0");

  cavity::RabiSpectrumParams spectrum;
  spectrum.omega0 = kTwoPi * omega0_khz;
  spectrum.detuning = kTwoPi * detuning_khz;
  spectrum.lam = kTwoPi * lambda_khz;
  spectrum.n_atoms = n_atoms;
  spectrum.theta = p.real("theta");
  spectrum.gamma_plus = kTwoPi * gamma_plus_khz;
  spectrum.gamma_minus = kTwoPi * gamma_minus_khz;

  const double center_khz = omega0_khz - detuning_khz / 2.0;
  const std::vector<double> grid_khz = linspace(center_khz - half_width_khz, center_khz + half_width_khz, points);
  std::vector<double> grid(points);
  std::transform(grid_khz.begin(), grid_khz.end(), grid.begin(), [](double f) { return kTwoPi * f; });
  const std::vector<double> im_chi = cavity::absorption_spectrum(spectrum, grid);

  out.table.columns = {"omega_khz", "offset_khz", "im_chi"};
  for (std::size_t k = 0; k < points; ++k) {
    out.table.add_row({grid_khz[k], grid_khz[k] - omega0_khz, im_chi[k]});
  }

  const auto [low, high] = cavity::rabi_peak_positions(omega0_khz, detuning_khz, lambda_khz, n_atoms);
  out.derived["peak_minus_khz"] = low;
  out.derived["peak_plus_khz"] = high;
  const auto mid = static_cast<std::ptrdiff_t>(points / 2);
  const auto low_max = std::max_element(im_chi.begin(), im_chi.begin() + mid);
  const auto high_max = std::max_element(im_chi.begin() + mid, im_chi.end());
  out.derived["argmax_minus_khz"] = grid_khz[static_cast<std::size_t>(low_max - im_chi.begin())];
  out.derived["argmax_plus_khz"] = grid_khz[static_cast<std::size_t>(high_max - im_chi.begin())];

  if (n_atoms + 1 <= 64) {
    cavity::TavisCummingsParams tc;
    tc.n_atoms = n_atoms;
    tc.omega0 = omega0_khz;
    tc.omega = omega0_khz - detuning_khz;
    tc.lam = lambda_khz;
    tc.n_max = 1;
    out.derived["eigen_splitting_khz"] = cavity::single_excitation_splitting(tc);
  }
}

// ---------------------------------------------------------------------------
// cavity-cat

void run_cavity_cat(Params& p, ScenarioOutput& out, const ScenarioConfig&, const RunOptions&) {
  const std::size_t n_lo = p.count("photons_min", 0);
  const std::size_t n_hi = p.count("photons_max", 0);
  require(n_hi >= n_lo, "photons_max must be >= photons_min");
  require(n_hi <= 200, "photons_max must be <= 200");
  const double lambda_khz = p.real("lambda_khz");
  const double detuning_khz = p.real("detuning_khz");
  const double t_r_ms = p.real("t_r_ms");
  require(lambda_khz >= 0.0, "lambda_khz must be >= 0");
  require(t_r_ms > 0.0, "t_r_ms must be > 0");
  require(!(p.is_set("phi") && p.is_set("t_int_us")), "set at most one of phi and t_int_us");

  std::string phase_source = "fixed";
  if (p.is_set("t_int_us")) {
    phase_source = "interaction-time";
    require(p.real("t_int_us") > 0.0, "t_int_us must be > 0");
    require(detuning_khz != 0.0, "detuning_khz must be nonzero when t_int_us is set");
  } else if (!p.is_set("phi")) {
    // Angle at which ten photons give D^2 = 2 / 0.24.
    phase_source = "operating-point";
    p.resolve("phi", std::asin(std::sqrt(2.0 / 0.24) / (2.0 * std::sqrt(10.0))));
  }
  if (!p.is_set("fock_cutoff")) {
    p.resolve("fock_cutoff", static_cast<std::int64_t>(std::ceil(4.0 * static_cast<double>(n_hi) + 10.0)));
  }
  const std::size_t cutoff = p.count("fock_cutoff", 1);
  require(2 * (cutoff + 1) <= kMaxDimension, "fock_cutoff exceeds the dimension cap");
  out.derived["phase_source"] = phase_source;

  const double lam = kTwoPi * lambda_khz;         // rad/ms
  const double detuning = kTwoPi * detuning_khz;  // rad/ms

  out.table.columns = {"n_bar",           "phi",       "distance",        "distance_small_angle",
                       "t_decoh_over_t_r", "t_decoh_ms", "pointer_overlap", "field_entropy"};
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    const double n_bar = static_cast<double>(n);
    cavity::CatParams cat;
    cat.n_bar = n_bar;
    cat.t_r = t_r_ms;
    double small_angle = 0.0;
    if (phase_source == "interaction-time") {
      const double t_ms = p.real("t_int_us") * 1e-3;
      cat.lam = lam;
      cat.detuning = detuning;
      cat.t_int = t_ms;
      cat.phi = cavity::probe_phase_shift(0.0, lam, n_bar, detuning, t_ms);
      small_angle = cavity::cat_distance(cat).small_angle.value_or(0.0);
    } else {
      cat.phi = p.real("phi");
      small_angle = 2.0 * std::sqrt(n_bar) * cat.phi;
    }
    const double distance = cavity::cat_distance(cat).exact;
    const auto t_decoh = cavity::decoherence_time(t_r_ms, std::abs(distance));

    const Complex alpha(std::sqrt(n_bar), 0.0);
    const Ket plus = coherent_state(alpha * std::polar(1.0, cat.phi), cutoff);
    const Ket minus = coherent_state(alpha * std::polar(1.0, -cat.phi), cutoff);
    const double overlap = std::abs(plus.amplitudes().dot(minus.amplitudes()));
    const DensityMatrix joint = DensityMatrix::from_ket(cavity::cat_state(alpha, cat.phi, cutoff));
    const std::size_t field = 1;
    const double entropy = von_neumann_entropy(partial_trace(joint, std::span(&field, 1)));

    out.table.add_row({static_cast<std::int64_t>(n), cat.phi, distance, small_angle,
                       t_decoh ? Cell(*t_decoh / t_r_ms) : Cell(std::monostate{}), optional_cell(t_decoh), overlap,
                       entropy});
  }
}

// ---------------------------------------------------------------------------
// lindblad-evolve

struct PreparedModel {
  LindbladModel model;
  DensityMatrix rho0;
  Matrix observable;
  std::function<std::optional<double>(double)> exact;
};

PreparedModel prepare_lindblad_model(const Params& p) {
  const std::string name = p.text("model");
  const double kappa = p.real("kappa");
  require(kappa >= 0.0, "kappa must be >= 0");

  if (name == "cavity-decay") {
    const std::size_t n_max = p.count("n_max", 1);
    require(n_max + 1 <= kMaxDimension, "n_max exceeds the dimension cap");
    const std::size_t n0 = p.count("n0", 0);
    require(n0 <= n_max, "n0 must be <= n_max");
    const HilbertSpace space = HilbertSpace::single(n_max + 1, "field");
    LindbladModel model(p.real("omega") * ops::number(n_max), {std::sqrt(kappa) * ops::annihilation(n_max)}, space);
    DensityMatrix rho0 = DensityMatrix::from_ket(Ket(ops::basis(n_max + 1, n0), space));
    const double n_init = static_cast<double>(n0);
    return {std::move(model), std::move(rho0), ops::number(n_max),
            [=](double t) -> std::optional<double> { return n_init * std::exp(-2.0 * kappa * t); }};
  }
  if (name == "qubit-decay") {
    const HilbertSpace space = HilbertSpace::single(2, "qubit");
    const Matrix excited = ops::basis(2, 1) * ops::basis(2, 1).adjoint();
    LindbladModel model(p.real("omega0") * excited, {std::sqrt(kappa) * ops::sigma_minus()}, space);
    DensityMatrix rho0 = DensityMatrix::from_ket(Ket(ops::basis(2, 1), space));
    return {std::move(model), std::move(rho0), excited,
            [=](double t) -> std::optional<double> { return std::exp(-2.0 * kappa * t); }};
  }
  if (name == "tavis-cummings") {
    cavity::TavisCummingsParams tc;
    tc.n_atoms = p.count("n_atoms", 1);
    tc.omega0 = p.real("omega0");
    tc.omega = p.real("omega");
    tc.lam = p.real("lambda");
    tc.kappa = kappa;
    tc.n_max = p.count("n_max", 1);
    try {
      tc.validate();
    } catch (const ArgumentError& e) {
      throw ValidationError(e.what());
    }
    LindbladModel model = cavity::build_tavis_cummings(tc);
    const std::size_t d = model.dimension();
    const std::size_t start = cavity::tavis_cummings_index(tc, tc.n_atoms, 0);
    DensityMatrix rho0 = DensityMatrix::from_ket(Ket(ops::basis(d, start), model.space()));
    Matrix n_op = tensor_product(ops::identity(tc.n_atoms + 1), ops::number(tc.n_max));
    return {std::move(model), std::move(rho0), std::move(n_op),
            [](double) -> std::optional<double> { return std::nullopt; }};
  }
  if (name == "decoherence-block") {
    const double a = p.real("alpha");
    const double b = p.real("beta");
    const double g = p.real("gamma");
    const kaon::PositivityVerdict verdict = kaon::check_positivity(a, b, g);
    require(verdict.valid, "alpha, beta, gamma: " + verdict.reason);
    const Eigen::Matrix2cd h = 0.5 * p.real("omega0") * ops::pauli_z() + 0.5 * p.real("lambda") * ops::pauli_x();
    LindbladModel model = kaon::decoherence_lindblad_model(h, a, b, g);
    DensityMatrix rho0 = DensityMatrix::from_ket(Ket(Vector(kaon::k0()), model.space()));
    return {std::move(model), std::move(rho0), ops::pauli_z(),
            [](double) -> std::optional<double> { return std::nullopt; }};
  }
  throw ValidationError("unknown model '" + name +
                        "' (expected cavity-decay, qubit-decay, tavis-cummings or decoherence-block)");
}

EvolutionMethod parse_method(const std::string& name) {
  if (name == "auto") return EvolutionMethod::Automatic;
  if (name == "expm") return EvolutionMethod::MatrixExponential;
  if (name == "rk") return EvolutionMethod::RungeKutta;
  throw ValidationError("unknown method '" + name + "' (expected auto, expm or rk)");
}

void run_lindblad_evolve(Params& p, ScenarioOutput& out, const ScenarioConfig&, const RunOptions&) {
  const double t_final = p.real("t_final");
  require(t_final > 0.0, "t_final must be > 0");
  const std::size_t points = p.count("points", 2);
  EvolveOptions options;
  options.method = parse_method(p.text("method"));
  options.rk_max_evaluations = p.count("rk_max_evaluations", 1);
  PreparedModel prepared = prepare_lindblad_model(p);
  if (options.method == EvolutionMethod::MatrixExponential) {
    require(prepared.model.dimension() <= kMaxSuperoperatorDimension, "expm method needs dimension <= 64");
  }
  const std::vector<double> times = linspace(0.0, t_final, points);
  const EvolutionResult result = evolve(prepared.model, prepared.rho0, times, options);

  out.derived["dimension"] = static_cast<std::int64_t>(prepared.model.dimension());
  out.derived["trace_preserving"] = prepared.model.trace_preserving();
  out.table.columns = {"t", "trace", "purity", "entropy", "observable", "observable_exact"};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Diagnostics& d = result.diagnostics[k];
    const double value = (prepared.observable * result.states[k].entries()).trace().real();
    out.table.add_row({times[k], d.trace, d.purity, d.entropy, value, optional_cell(prepared.exact(times[k]))});
  }
}

// ---------------------------------------------------------------------------
// qsd-compare

void run_qsd_compare(Params& p, ScenarioOutput& out, const ScenarioConfig& config, const RunOptions& run) {
  const std::string name = p.text("model");
  const double kappa = p.real("kappa");
  const double dt = p.real("dt");
  const double t_final = p.real("t_final");
  const std::size_t points = p.count("points", 2);
  const std::size_t m = p.count("trajectories", 1);
  require(kappa > 0.0, "kappa must be > 0");
  require(dt > 0.0 && kappa * dt <= 1e-3 * (1.0 + 1e-12), "dt must satisfy 0 < kappa*dt <= 1e-3");
  require(t_final > 0.0, "t_final must be > 0");
  require(m <= 10'000'000, "trajectories must be <= 1e7");

  std::optional<LindbladModel> model;
  std::optional<Ket> psi0;
  Matrix observable;
  if (name == "qubit-decay") {
    const HilbertSpace space = HilbertSpace::single(2, "qubit");
    const Matrix excited = ops::basis(2, 1) * ops::basis(2, 1).adjoint();
    model.emplace(p.real("omega0") * excited, std::vector<Matrix>{std::sqrt(kappa) * ops::sigma_minus()}, space);
    psi0.emplace(ops::basis(2, 1), space);
    observable = excited;
  } else if (name == "cavity-decay") {
    const std::size_t n_max = p.count("n_max", 1);
    require(n_max + 1 <= kMaxSuperoperatorDimension, "n_max must be < 64");
    try {
      psi0.emplace(coherent_state(Complex(p.real("alpha"), 0.0), n_max));
    } catch (const ArgumentError& e) {
      throw ValidationError(e.what());
    }
    model.emplace(p.real("omega0") * ops::number(n_max),
                  std::vector<Matrix>{std::sqrt(kappa) * ops::annihilation(n_max)}, psi0->space());
    observable = ops::number(n_max);
  } else {
    throw ValidationError("unknown model '" + name + "' (expected qubit-decay or cavity-decay)");
  }

  const std::vector<double> times = linspace(0.0, t_final, points);
  NoiseSpec noise;
  noise.dt = dt;
  noise.master_seed = config.seed.value_or(1);
  out.seed = noise.master_seed;
  EnsembleOptions options;
  options.threads = run.threads;
  options.keep_trajectories = false;
  Ensemble ensemble;
  try {
    ensemble = run_ensemble(*model, *psi0, times, m, noise, options);
  } catch (const EnsembleFailure&) {
    throw;
  } catch (const ArgumentError& e) {
    throw ValidationError(e.what());
  }
  const EvolutionResult reference = evolve(*model, DensityMatrix::from_ket(*psi0), times);

  double worst = 0.0;
  out.table.columns = {"t",
                       "frobenius_error",
                       "ensemble_purity",
                       "lindblad_purity",
                       "ensemble_observable",
                       "lindblad_observable"};
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Matrix& mean = ensemble.mean_states[k].entries();
    const Matrix& exact = reference.states[k].entries();
    const double error = frobenius_distance(mean, exact);
    worst = std::max(worst, error);
    out.table.add_row({times[k], error, purity(mean), purity(exact), (observable * mean).trace().real(),
                       (observable * exact).trace().real()});
  }
  out.derived["max_frobenius_error"] = worst;
  out.derived["statistical_scale"] = 1.0 / std::sqrt(static_cast<double>(m));
}

// ---------------------------------------------------------------------------
// kaon scenarios

kaon::KaonParams kaon_constants(const Params& p) {
  kaon::KaonParams k;
  k.gamma_s = p.real("gamma_s");
  k.gamma_l = p.real("gamma_l");
  k.delta_m = p.real("delta_m");
  k.epsilon = Complex(p.real("epsilon_re"), p.real("epsilon_im"));
  return k;
}

void validate_kaon(const kaon::KaonParams& k) {
  try {
    k.validate();
  } catch (const ArgumentError& e) {
    throw ValidationError(e.what());
  }
}

void run_kaon_asymmetry(Params& p, ScenarioOutput& out, const ScenarioConfig&, const RunOptions&) {
  kaon::KaonParams k = kaon_constants(p);
  const std::string preset = p.text("preset");
  kaon::KaonParams base;
  if (preset == "cplear-bounds") {
    base = kaon::preset_cplear_bounds();
  } else {
    require(preset == "qm", "unknown preset '" + preset + "' (expected cplear-bounds or qm)");
  }
  for (const auto& [name, value] : {std::pair{"alpha", base.alpha}, {"beta", base.beta}, {"gamma", base.gamma}}) {
    if (!p.is_set(name)) {
      p.resolve(name, value);
    }
  }
  k.alpha = p.real("alpha");
  k.beta = p.real("beta");
  k.gamma = p.real("gamma");
  validate_kaon(k);

  const std::size_t points = p.count("points", 2);
  const double t_max = p.real("t_max");
  require(t_max > 0.0, "t_max must be > 0");
  const std::string unit = p.text("time_unit");
  double t_max_gev = 0.0;
  if (unit == "tau_s") {
    t_max_gev = t_max * k.tau_s();
  } else if (unit == "s") {
    t_max_gev = t_max / kaon::kHbarGeVSeconds;
  } else {
    throw ValidationError("unknown time_unit '" + unit + "' (expected tau_s or s)");
  }
  const std::vector<double> times = linspace(0.0, t_max_gev, points);

  const auto a_2pi = kaon::asymmetry_2pi(k, times);
  const auto a_dm = kaon::asymmetry_dm(k, times);
  const auto tagged = kaon::evolve_kaon(k, kaon::KaonState::from_ket(kaon::k0()), times);

  out.derived["positivity"] = kaon::check_positivity(k.alpha, k.beta, k.gamma).reason;
  out.derived["tau_s_gev_inv"] = k.tau_s();
  out.table.columns = {"t_over_tau_s", "a_2pi", "a_dm", "trace", "purity", "entropy"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Matrix rho = tagged[i].matrix();
    out.table.add_row({times[i] * k.gamma_s, optional_cell(a_2pi[i]), optional_cell(a_dm[i]), tagged[i].trace(),
                       purity(rho), von_neumann_entropy(rho)});
  }
}

void run_kaon_scan(Params& p, ScenarioOutput& out, const ScenarioConfig&, const RunOptions& run) {
  const kaon::KaonParams constants = kaon_constants(p);
  validate_kaon(constants);
  const std::size_t n_alpha = p.count("alpha_points", 1);
  const std::size_t n_gamma = p.count("gamma_points", 1);
  require(n_alpha * n_gamma <= 1'000'000, "scan grid must have at most 1e6 points");
  const double t_over_tau = p.real("t_over_tau_s");
  require(t_over_tau >= 0.0, "t_over_tau_s must be >= 0");
  const std::vector<double> alphas = linspace(p.real("alpha_min"), p.real("alpha_max"), n_alpha);
  const std::vector<double> gammas = linspace(p.real("gamma_min"), p.real("gamma_max"), n_gamma);
  const double beta = p.real("beta");
  const std::vector<double> times{0.0, t_over_tau * constants.tau_s()};

  std::vector<std::vector<Cell>> rows(n_alpha * n_gamma);
  parallel_for(rows.size(), run.threads == 0 ? default_thread_count() : run.threads, [&](std::size_t index) {
    kaon::KaonParams k = constants;
    k.alpha = alphas[index / n_gamma];
    k.gamma = gammas[index % n_gamma];
    k.beta = beta;
    const bool valid = kaon::check_positivity(k.alpha, k.beta, k.gamma).valid;
    std::vector<Cell> row{k.alpha, k.beta, k.gamma, static_cast<std::int64_t>(valid)};
    if (valid) {
      const auto a_2pi = kaon::asymmetry_2pi(k, times);
      const auto a_dm = kaon::asymmetry_dm(k, times);
      const auto tagged = kaon::evolve_kaon(k, kaon::KaonState::from_ket(kaon::k0()), times);
      row.insert(row.end(), {optional_cell(a_2pi.back()), optional_cell(a_dm.back()), purity(tagged.back().matrix())});
    } else {
      row.insert(row.end(), 3, Cell(std::monostate{}));
    }
    rows[index] = std::move(row);
  });
  out.table.columns = {"alpha", "beta", "gamma", "positivity_valid", "a_2pi", "a_dm", "purity"};
  for (auto& row : rows) {
    out.table.add_row(std::move(row));
  }
}

// ---------------------------------------------------------------------------
// foam-estimate

void run_foam_estimate(Params& p, ScenarioOutput& out, const ScenarioConfig&, const RunOptions&) {
  const double mass = p.real("particle_mass");
  const double planck = p.real("planck_mass");
  const double separation_cm = p.real("separation_cm");
  const double t_seconds = p.real("t_seconds");
  const double energy = p.real("energy_scale");
  const std::size_t decades = p.count("n_decades", 0);
  require(mass > 0.0 && planck > 0.0 && energy > 0.0, "masses and energy_scale must be > 0");
  require(separation_cm >= 0.0 && t_seconds >= 0.0, "separation_cm and t_seconds must be >= 0");
  require(decades <= 300, "n_decades must be <= 300");
  if (!p.is_set("coupling_d")) {
    p.resolve("coupling_d", foam::coupling_estimate(mass, planck));
  }
  const double coupling = p.real("coupling_d");
  require(coupling > 0.0, "coupling_d must be > 0");

  const double separation = separation_cm * foam::kCentimeterInGeVInverse;
  const double t = t_seconds * foam::kSecondInGeVInverse;
  out.derived["delta_h_magnitude_gev"] = foam::delta_h_magnitude(energy, planck);
  out.table.columns = {"n_particles", "coupling_d_gev3", "separation_gev_inv", "t_gev_inv", "exponent", "envelope"};
  for (std::size_t k = 0; k <= decades; ++k) {
    const double n = std::pow(10.0, static_cast<double>(k));
    out.table.add_row({n, coupling, separation, t, foam::wormhole_exponent(n, coupling, separation, t),
                       foam::wormhole_envelope(n, coupling, separation, t)});
  }
}

// ---------------------------------------------------------------------------

std::vector<ParamSpec> kaon_constant_specs() {
  const kaon::KaonParams d;
  return {real("gamma_s", d.gamma_s), real("gamma_l", d.gamma_l), real("delta_m", d.delta_m),
          real("epsilon_re", d.epsilon.real()), real("epsilon_im", d.epsilon.imag())};
}

template <typename... Lists>
std::vector<ParamSpec> join(std::vector<ParamSpec> first, const Lists&... rest) {
  (first.insert(first.end(), rest.begin(), rest.end()), ...);
  return first;
}

const std::map<std::string, ScenarioDef>& registry() {
  static const std::map<std::string, ScenarioDef> defs = [] {
    std::map<std::string, ScenarioDef> m;
    m["cavity-spectrum"] = {
        {"hamrabi", "suscept", "rabiabs", "rabisplitting", "dispersive"},
        {real("omega0_khz", 51099000.0), real("detuning_khz", 0.0), real("lambda_khz", 24.0),
         integer("n_atoms", 1), real("theta", nullptr), real("gamma_plus_khz", nullptr),
         real("gamma_minus_khz", nullptr), integer("points", 10000), real("half_width_khz", nullptr)},
        run_cavity_spectrum};
    m["cavity-cat"] = {{"super", "rabiphase", "distance", "decoh"},
                       {integer("photons_min", 0), integer("photons_max", 10), real("phi", nullptr),
                        real("t_int_us", nullptr), real("lambda_khz", 24.0), real("detuning_khz", 70.0),
                        real("t_r_ms", 1.0), integer("fock_cutoff", nullptr)},
                       run_cavity_cat};
    m["lindblad-evolve"] = {{"markovrabi", "markovtype"},
                            {text("model", "cavity-decay"), real("kappa", 1.0), integer("n_max", 20),
                             integer("n0", 5), real("t_final", 3.0), integer("points", 61), integer("n_atoms", 1),
                             real("omega0", 1.0), real("omega", 1.0), real("lambda", 0.5), real("alpha", 1.0),
                             real("beta", 0.5), real("gamma", 1.0), text("method", "auto"),
                             integer("rk_max_evaluations", 1000000)},
                            run_lindblad_evolve};
    m["qsd-compare"] = {{"ito", "markovtype"},
                        {text("model", "qubit-decay"), real("kappa", 1.0), integer("trajectories", 4000),
                         real("dt", 1e-3), real("t_final", 3.0), integer("points", 31), real("omega0", 0.0),
                         integer("n_max", 4), real("alpha", 0.2)},
                        run_qsd_compare};
    m["kaon-asymmetry"] = {{"nqmevol", "deltah", "positiv", "twopiasy", "deltamasy", "bounds"},
                           join({text("preset", "cplear-bounds"), real("alpha", nullptr), real("beta", nullptr),
                                 real("gamma", nullptr)},
                                kaon_constant_specs(),
                                std::vector<ParamSpec>{real("t_max", 20.0), integer("points", 400),
                                                       text("time_unit", "tau_s")}),
                           run_kaon_asymmetry};
    m["kaon-scan"] = {{"nqmevol", "deltah", "positiv", "twopiasy", "deltamasy"},
                      join({real("alpha_min", 0.0), real("alpha_max", 8.0e-17), integer("alpha_points", 5),
                            real("gamma_min", 0.0), real("gamma_max", 7.4e-21), integer("gamma_points", 5),
                            real("beta", 0.0), real("t_over_tau_s", 10.0)},
                           kaon_constant_specs()),
                      run_kaon_scan};
    m["foam-estimate"] = {{"decohmoha", "order"},
                          {real("particle_mass", foam::kProtonMassGeV), real("planck_mass", foam::kPlanckMassGeV),
                           real("separation_cm", 1.0), real("t_seconds", 1.0), integer("n_decades", 23),
                           real("energy_scale", foam::kKaonMassGeV), real("coupling_d", nullptr)},
                          run_foam_estimate};
    return m;
  }();
  return defs;
}

const ScenarioDef& lookup(const std::string& scenario) {
  const auto& defs = registry();
  const auto it = defs.find(scenario);
  if (it == defs.end()) {
    std::string known;
    for (const std::string& name : scenario_names()) {
      known += (known.empty() ? "" : ", ") + name;
    }
    throw ValidationError("unknown scenario '" + scenario + "' (expected one of " + known + ")");
  }
  return it->second;
}

std::string metadata_value(const Json& v) {
  if (v.is_number_float()) {
    return format_real(v.get<double>());
  }
  if (v.is_string()) {
    return v.get<std::string>();
  }
  return v.dump();
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"cavity-spectrum", "cavity-cat", "lindblad-evolve", "qsd-compare",
                                              "kaon-asymmetry",  "kaon-scan",  "foam-estimate"};
  return names;
}

const std::vector<ParamSpec>& scenario_parameters(const std::string& scenario) { return lookup(scenario).params; }

ScenarioConfig parse_config(const std::string& scenario, const std::string& text) {
  lookup(scenario);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  require(doc.is_object(), "config must be a JSON object");
  ScenarioConfig config;
  config.scenario = scenario;
  for (const auto& item : doc.items()) {
    const std::string& key = item.key();
    const Json& v = item.value();
    if (key == "scenario") {
      require(v.is_string() && v.get<std::string>() == scenario,
              "config scenario does not match the requested scenario '" + scenario + "'");
    } else if (key == "seed") {
      require(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0),
              "seed must be a non-negative integer");
      config.seed = v.get<std::uint64_t>();
    } else if (key == "parameters") {
      require(v.is_object(), "parameters must be a JSON object");
      config.parameters = v;
    } else if (key == "output") {
      require(v.is_object(), "output must be a JSON object");
      for (const auto& o : v.items()) {
        require(o.value().is_string(), "output." + o.key() + " must be a string");
        if (o.key() == "path") {
          config.output_path = o.value().get<std::string>();
        } else if (o.key() == "format") {
          try {
            config.format = parse_table_format(o.value().get<std::string>());
          } catch (const ArgumentError& e) {
            throw ValidationError(e.what());
          }
        } else {
          throw ValidationError("unknown output key '" + o.key() + "'");
        }
      }
    } else {
      throw ValidationError("unknown config key '" + key + "'");
    }
  }
  // Surface unknown parameter names before anything runs.
  Params(scenario, lookup(scenario).params, config.parameters);
  return config;
}

ScenarioConfig load_config(const std::string& scenario, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), "cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(scenario, buffer.str());
}

void apply_override(ScenarioConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string::npos && eq > 0, "override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) {
    value = raw;
  }
  Json updated = config.parameters;
  updated[key] = value;
  Params(config.scenario, lookup(config.scenario).params, updated);
  config.parameters = std::move(updated);
}

ScenarioOutput run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const ScenarioDef& def = lookup(config.scenario);
  Params params(config.scenario, def.params, config.parameters);
  ScenarioOutput out;
  out.scenario = config.scenario;
  out.equations = def.equations;
  out.seed = config.seed;
  def.run(params, out, config, options);
  out.parameters = params.ordered();
  return out;
}

std::string render_output(const ScenarioOutput& output, TableFormat format) {
  if (format == TableFormat::Json) {
    Json doc = Json::object();
    Json meta = Json::object();
    meta["scenario"] = output.scenario;
    meta["equations"] = output.equations;
    meta["seed"] = output.seed ? Json(*output.seed) : Json(nullptr);
    meta["parameters"] = output.parameters;
    meta["derived"] = output.derived;
    doc["metadata"] = std::move(meta);
    doc["records"] = Json::parse(emit_json(output.table));
    return doc.dump(2) + "\n";
  }
  std::string header = "# scenario: " + output.scenario + "\n# equations: ";
  for (std::size_t i = 0; i < output.equations.size(); ++i) {
    header += (i ? ", " : "") + output.equations[i];
  }
  header += "\n# seed: " + (output.seed ? std::to_string(*output.seed) : std::string("none")) + "\n";
  for (const auto& item : output.parameters.items()) {
    header += "# param." + item.key() + ": " + metadata_value(item.value()) + "\n";
  }
  for (const auto& item : output.derived.items()) {
    header += "# derived." + item.key() + ": " + metadata_value(item.value()) + "\n";
  }
  return header + emit_csv(output.table);
}

}  // namespace decoherence::cli
