#include "decoherence/lindblad.hpp"

#include <cmath>
#include <map>

#include <boost/numeric/odeint.hpp>
#include <unsupported/Eigen/MatrixFunctions>

namespace decoherence {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_shape(const Matrix& m, std::size_t d, const char* what) {
  if (static_cast<std::size_t>(m.rows()) != d || static_cast<std::size_t>(m.cols()) != d) {
    throw ArgumentError(std::string("LindbladModel: ") + what + " has wrong dimension");
  }
}

}  // namespace

LindbladModel::LindbladModel(Matrix h_eff, std::vector<Matrix> lindblad_ops, HilbertSpace space)
    : h_eff_(std::move(h_eff)), ops_(std::move(lindblad_ops)), space_(std::move(space)) {
  const std::size_t d = space_.dimension();
  require_shape(h_eff_, d, "h_eff");
  for (const Matrix& b : ops_) {
    require_shape(b, d, "Lindblad operator");
  }
  trace_preserving_ = hermiticity_defect(h_eff_) <= kHermiticityTolerance;
}

LindbladModel::LindbladModel(Matrix h_eff, std::vector<Matrix> lindblad_ops, Matrix coefficients,
                             HilbertSpace space)
    : LindbladModel(std::move(h_eff), std::move(lindblad_ops), std::move(space)) {
  if (static_cast<std::size_t>(coefficients.rows()) != ops_.size() || coefficients.rows() != coefficients.cols()) {
    throw ArgumentError("LindbladModel: coefficient matrix must be k x k for k operators");
  }
  if (hermiticity_defect(coefficients) > kHermiticityTolerance * std::max(1.0, coefficients.cwiseAbs().maxCoeff())) {
    throw ArgumentError("LindbladModel: coefficient matrix must be Hermitian");
  }
  coefficients_ = std::move(coefficients);
}

std::vector<Matrix> LindbladModel::diagonal_operators() const {
  if (!coefficients_) {
    return ops_;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(*coefficients_));
  const RealVector& weights = solver.eigenvalues();
  const double scale = std::max(1.0, weights.cwiseAbs().maxCoeff());
  std::vector<Matrix> out;
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    if (weights(k) < -1e-12 * scale) {
      throw ArgumentError("LindbladModel: coefficient matrix is not positive semidefinite");
    }
    if (weights(k) <= 1e-14 * scale) {
      continue;
    }
    Matrix b = Matrix::Zero(h_eff_.rows(), h_eff_.cols());
    for (std::size_t j = 0; j < ops_.size(); ++j) {
      b += solver.eigenvectors()(idx(j), k) * ops_[j];
    }
    out.push_back(std::sqrt(weights(k)) * b);
  }
  return out;
}

Vector vectorize(const Matrix& rho) { return Eigen::Map<const Vector>(rho.data(), rho.size()); }

Matrix unvectorize(const Vector& v, std::size_t dim) {
  if (static_cast<std::size_t>(v.size()) != dim * dim) {
    throw ArgumentError("unvectorize: length is not dim^2");
  }
  return Eigen::Map<const Matrix>(v.data(), idx(dim), idx(dim));
}

Matrix build_superoperator(const LindbladModel& model) {
  const std::size_t d = model.dimension();
  if (d > kMaxSuperoperatorDimension) {
    throw ArgumentError("build_superoperator: dimension " + std::to_string(d) + " exceeds 64");
  }
  const Matrix id = Matrix::Identity(idx(d), idx(d));
  const Matrix& h = model.h_eff();
  Matrix l = Complex(0.0, -1.0) * tensor_product(id, h) + Complex(0.0, 1.0) * tensor_product(h.conjugate(), id);

  const auto& fs = model.lindblad_ops();
  for (std::size_t j = 0; j < fs.size(); ++j) {
    for (std::size_t k = 0; k < fs.size(); ++k) {
      Complex c = (j == k) ? 1.0 : 0.0;
      if (model.coefficients()) {
        c = (*model.coefficients())(idx(j), idx(k));
      }
      if (c == 0.0) {
        continue;
      }
      const Matrix fkfj = fs[k].adjoint() * fs[j];
      l += c * (2.0 * tensor_product(fs[k].conjugate(), fs[j]) - tensor_product(id, fkfj) -
                tensor_product(fkfj.transpose(), id));
    }
  }
  return l;
}

Matrix lindblad_rhs(const LindbladModel& model, const Matrix& rho) {
  const Matrix& h = model.h_eff();
  Matrix out = Complex(0.0, -1.0) * (h * rho - rho * h.adjoint());
  const auto& fs = model.lindblad_ops();
  for (std::size_t j = 0; j < fs.size(); ++j) {
    for (std::size_t k = 0; k < fs.size(); ++k) {
      Complex c = (j == k) ? 1.0 : 0.0;
      if (model.coefficients()) {
        c = (*model.coefficients())(idx(j), idx(k));
      }
      if (c == 0.0) {
        continue;
      }
      const Matrix fkfj = fs[k].adjoint() * fs[j];
      out += c * (2.0 * fs[j] * rho * fs[k].adjoint() - fkfj * rho - rho * fkfj);
    }
  }
  return out;
}

Diagnostics diagnose(const Matrix& rho) {
  Diagnostics out;
  out.trace = rho.trace().real();
  out.purity = purity(rho);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(rho) / out.trace, Eigen::EigenvaluesOnly);
  for (double l : solver.eigenvalues()) {
    if (l > 0.0) {
      out.entropy -= l * std::log(l);
    }
  }
  return out;
}

namespace {

void validate_grid(std::span<const double> times) {
  if (times.empty()) {
    throw ArgumentError("evolve: time grid is empty");
  }
  if (times.front() != 0.0) {
    throw ArgumentError("evolve: time grid must start at 0");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1]) || !std::isfinite(times[k])) {
      throw ArgumentError("evolve: time grid must be strictly increasing and finite");
    }
  }
}

DensityMatrix checked_output(const Matrix& raw, const HilbertSpace& space, double t, const EvolveOptions& options) {
  if (!raw.allFinite()) {
    throw IntegrationError("evolve: non-finite state at t=" + std::to_string(t));
  }
  Matrix rho = hermitian_part(raw);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
  const double lowest = solver.eigenvalues().minCoeff();
  if (lowest < -options.failure_positivity) {
    throw IntegrationError("evolve: positivity violated (eigenvalue " + std::to_string(lowest) +
                           ") at t=" + std::to_string(t));
  }
  DensityValidation validation;
  validation.positivity = options.failure_positivity;
  validation.trace = 1e-9;
  return DensityMatrix(std::move(rho), space, validation);
}

using OdeState = std::vector<Complex>;

}  // namespace

EvolutionResult evolve(const LindbladModel& model, const DensityMatrix& rho0, std::span<const double> times,
                       const EvolveOptions& options) {
  validate_grid(times);
  const std::size_t d = model.dimension();
  if (rho0.dimension() != d) {
    throw ArgumentError("evolve: initial state dimension does not match model");
  }

  EvolutionMethod method = options.method;
  if (method == EvolutionMethod::Automatic) {
    method = (d <= kMaxSuperoperatorDimension && d * d <= options.exponential_limit)
                 ? EvolutionMethod::MatrixExponential
                 : EvolutionMethod::RungeKutta;
  }

  EvolutionResult result;
  result.times.assign(times.begin(), times.end());
  result.states.reserve(times.size());
  result.diagnostics.reserve(times.size());
  auto record = [&](const Matrix& raw, double t) {
    result.states.push_back(checked_output(raw, model.space(), t, options));
    result.diagnostics.push_back(diagnose(result.states.back().entries()));
  };

  if (method == EvolutionMethod::MatrixExponential) {
    const Matrix generator = build_superoperator(model);
    std::map<double, Matrix> propagators;
    Vector v = vectorize(rho0.entries());
    record(rho0.entries(), 0.0);
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double dt = times[k] - times[k - 1];
      // Steps equal up to rounding of the grid share a propagator.
      auto it = propagators.lower_bound(dt * (1.0 - 1e-12));
      if (it == propagators.end() || it->first > dt * (1.0 + 1e-12)) {
        Matrix scaled = generator * dt;
        it = propagators.emplace(dt, scaled.exp()).first;
      }
      v = it->second * v;
      record(unvectorize(v, d), times[k]);
    }
    return result;
  }

  namespace odeint = boost::numeric::odeint;
  std::size_t evaluations = 0;
  auto system = [&](const OdeState& x, OdeState& dxdt, double t) {
    if (++evaluations > options.rk_max_evaluations) {
      throw IntegrationError("evolve: step budget exhausted near t=" + std::to_string(t) +
                             " (problem too stiff for the RK path)");
    }
    Eigen::Map<const Matrix> rho(x.data(), idx(d), idx(d));
    const Matrix rhs = lindblad_rhs(model, rho);
    dxdt.assign(rhs.data(), rhs.data() + rhs.size());
  };
  OdeState state(rho0.entries().data(), rho0.entries().data() + rho0.entries().size());
  auto observer = [&](const OdeState& x, double t) {
    record(Eigen::Map<const Matrix>(x.data(), idx(d), idx(d)), t);
  };
  const double span = times.back() > 0.0 ? times.back() : 1.0;
  auto stepper = odeint::make_dense_output(options.rk_absolute_tolerance, options.rk_relative_tolerance,
                                           odeint::runge_kutta_dopri5<OdeState>());
  try {
    odeint::integrate_times(stepper, system, state, times.begin(), times.end(), span * 1e-4, observer);
  } catch (const odeint::odeint_error& e) {
    throw IntegrationError(std::string("evolve: integrator failed: ") + e.what());
  }
  return result;
}

DensityMatrix secular_propagate(const DensityMatrix& rho0, std::span<const double> energies,
                                const RealMatrix& dampings, double t) {
  const std::size_t d = rho0.dimension();
  if (energies.size() != d || static_cast<std::size_t>(dampings.rows()) != d ||
      static_cast<std::size_t>(dampings.cols()) != d) {
    throw ArgumentError("secular_propagate: dimension mismatch");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (dampings(idx(i), idx(i)) != 0.0) {
      throw ArgumentError("secular_propagate: damping diagonal must be zero");
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double g = dampings(idx(i), idx(j));
      if (g < 0.0 || !std::isfinite(g)) {
        throw ArgumentError("secular_propagate: negative or non-finite damping entry");
      }
      if (g != dampings(idx(j), idx(i))) {
        throw ArgumentError("secular_propagate: damping matrix must be symmetric");
      }
    }
  }
  Matrix rho = rho0.entries();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const Complex rate(-dampings(idx(i), idx(j)), -(energies[i] - energies[j]));
      rho(idx(i), idx(j)) *= std::exp(rate * t);
    }
  }
  return DensityMatrix(std::move(rho), rho0.space());
}

}  // namespace decoherence
