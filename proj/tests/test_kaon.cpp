#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "doctest.h"

#include "decoherence/errors.hpp"
#include "decoherence/foam.hpp"
#include "decoherence/kaon.hpp"
#include "decoherence/operators.hpp"

using namespace decoherence;
using namespace decoherence::kaon;

namespace {

std::vector<double> tau_grid(const KaonParams& p, double t_max_tau, int points) {
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    t[static_cast<std::size_t>(k)] = t_max_tau * p.tau_s() * k / (points - 1);
  }
  return t;
}

// Closed-form amplitude propagation through the K_S / K_L eigenbasis.
struct AmplitudeOracle {
  Complex v[2][2];
  Complex inv[2][2];
  Complex lambda[2];

  explicit AmplitudeOracle(const KaonParams& p) {
    const Complex e = p.epsilon;
    const double ns = std::sqrt(1.0 + std::norm(e));
    v[0][0] = 1.0 / ns;
    v[1][0] = e / ns;
    v[0][1] = e / ns;
    v[1][1] = 1.0 / ns;
    const Complex det = v[0][0] * v[1][1] - v[0][1] * v[1][0];
    inv[0][0] = v[1][1] / det;
    inv[0][1] = -v[0][1] / det;
    inv[1][0] = -v[1][0] / det;
    inv[1][1] = v[0][0] / det;
    lambda[0] = Complex(0.0, -p.gamma_s / 2.0);
    lambda[1] = Complex(p.delta_m, -p.gamma_l / 2.0);
  }

  std::array<Complex, 2> evolve(std::array<Complex, 2> psi, double t) const {
    std::array<Complex, 2> c{};
    for (int j = 0; j < 2; ++j) {
      c[j] = (inv[j][0] * psi[0] + inv[j][1] * psi[1]) * std::exp(Complex(0.0, -1.0) * lambda[j] * t);
    }
    return {v[0][0] * c[0] + v[0][1] * c[1], v[1][0] * c[0] + v[1][1] * c[1]};
  }
};

double k1_weight(const std::array<Complex, 2>& psi) { return std::norm(psi[0]); }
double k0_weight(const std::array<Complex, 2>& psi) { return std::norm(psi[0] + psi[1]) / 2.0; }
double k0bar_weight(const std::array<Complex, 2>& psi) { return std::norm(psi[0] - psi[1]) / 2.0; }

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
const std::array<Complex, 2> kK0{kInvSqrt2, kInvSqrt2};
const std::array<Complex, 2> kK0bar{kInvSqrt2, -kInvSqrt2};

double oracle_a2pi(const AmplitudeOracle& o, double t) {
  const double r = k1_weight(o.evolve(kK0, t));
  const double rb = k1_weight(o.evolve(kK0bar, t));
  return (rb - r) / (rb + r);
}

double oracle_adm(const AmplitudeOracle& o, double t) {
  const auto k = o.evolve(kK0, t);
  const auto kb = o.evolve(kK0bar, t);
  const double num = k0bar_weight(k) + k0_weight(kb) - k0bar_weight(kb) - k0_weight(k);
  const double den = k0bar_weight(k) + k0_weight(kb) + k0bar_weight(kb) + k0_weight(k);
  return num / den;
}

double normalized_purity(const KaonState& s) {
  const double r0 = s.pauli(0);
  return 0.5 * (1.0 + s.pauli.tail<3>().squaredNorm() / (r0 * r0));
}

// Damping rate of the complex eigenvalue pair (the Delta m oscillation).
double interference_damping(const Eigen::Matrix4d& g) {
  const Eigen::Vector4cd ev = Eigen::EigenSolver<Eigen::Matrix4d>(g).eigenvalues();
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < 4; ++k) {
    if (std::abs(ev(k).imag()) > std::abs(ev(best).imag())) best = k;
  }
  return -ev(best).real();
}

}  // namespace

TEST_CASE("QM generator without CP violation") {
  KaonParams p;
  p.epsilon = 0.0;
  const Eigen::Matrix4d g = build_kaon_generator(p);
  const double mean = (p.gamma_s + p.gamma_l) / 2.0;
  const double half_diff = (p.gamma_s - p.gamma_l) / 2.0;
  const double tol = 1e-12 * p.gamma_s;
  Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
  expected(0, 0) = expected(3, 3) = -mean;
  expected(0, 3) = expected(3, 0) = -half_diff;
  expected(1, 1) = expected(2, 2) = -mean;
  expected(1, 2) = p.delta_m;
  expected(2, 1) = -p.delta_m;
  CHECK((g - expected).cwiseAbs().maxCoeff() < tol);

  // Populations: K1 decays at Gamma_S, K2 at Gamma_L.
  const Eigen::Vector4d k1 = KaonState::from_ket(kaon::k1()).pauli;
  const Eigen::Vector4d k2 = KaonState::from_ket(kaon::k2()).pauli;
  CHECK(((g * k1) + p.gamma_s * k1).cwiseAbs().maxCoeff() < tol);
  CHECK(((g * k2) + p.gamma_l * k2).cwiseAbs().maxCoeff() < tol);
}

TEST_CASE("decoherence block structure") {
  const Eigen::Matrix4d block = decoherence_block(4.0e-17, 2.3e-19, 3.7e-21);
  CHECK(block.row(0).isZero(0.0));
  CHECK(block.row(1).isZero(0.0));
  CHECK(block.col(0).isZero(0.0));
  CHECK(block.col(1).isZero(0.0));
  CHECK(block(2, 2) == -8.0e-17);
  CHECK(block(2, 3) == -4.6e-19);
  CHECK(block(3, 2) == -4.6e-19);
  CHECK(block(3, 3) == -7.4e-21);

  const Eigen::Matrix4d iso = decoherence_block(0.3, 0.0, 0.3);
  CHECK(iso.bottomRightCorner<2, 2>() == -0.6 * Eigen::Matrix2d::Identity());
}

TEST_CASE("lindblad form of the decoherence block") {
  const LindbladModel only_block = decoherence_lindblad_model(Eigen::Matrix2cd::Zero(), 1.0, 0.5, 1.0);
  const Eigen::Matrix4d g = pauli_generator(only_block);
  CHECK((g - decoherence_block(1.0, 0.5, 1.0)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(g.row(0).isZero(1e-15));
  CHECK(g.row(1).isZero(1e-15));
  CHECK(only_block.trace_preserving());
  CHECK_THROWS_AS(decoherence_lindblad_model(Eigen::Matrix2cd::Zero(), 1.0, 2.0, 1.0), ConstraintError);
}

TEST_CASE("positivity verdicts") {
  CHECK(check_positivity(1e-17, 0.0, 1e-17).valid);
  CHECK_FALSE(check_positivity(4.0, 2.0, 1.0).valid);  // alpha*gamma == beta^2
  CHECK(check_positivity(0.0, 0.0, 0.0).valid);
  CHECK_FALSE(check_positivity(0.0, 0.0, 1e-21).valid);
  CHECK_FALSE(check_positivity(1e-17, 0.0, -1e-21).valid);
  const double a = 4.0e-17, b = 2.3e-19, c = 3.7e-21;
  CHECK(std::abs(a * c - 1.48e-37) < 1e-50);
  CHECK(std::abs(b * b - 5.29e-38) < 1e-50);
  CHECK(check_positivity(a, b, c).valid);
}

TEST_CASE("parameter validation") {
  KaonParams p;
  p.gamma_l = p.gamma_s;
  CHECK_THROWS_AS(p.validate(), ConstraintError);
  p = KaonParams{};
  p.delta_m = 0.0;
  CHECK_THROWS_AS(p.validate(), ConstraintError);
  p = KaonParams{};
  p.alpha = 1e-17;
  p.beta = 1e-16;
  p.gamma = 1e-17;
  CHECK_THROWS_AS(build_kaon_generator(p), ConstraintError);
}

TEST_CASE("preset bounds") {
  const KaonParams p = preset_cplear_bounds();
  CHECK(check_positivity(p.alpha, p.beta, p.gamma).valid);
  CHECK_NOTHROW(p.validate());
  // The three bounds straddle m_K^2 / M_P ~ 2.0e-20 GeV.
  const double scale = foam::delta_h_magnitude(foam::kKaonMassGeV);
  CHECK(std::abs(scale - 2.03e-20) < 0.005e-20);
  CHECK(p.gamma / scale < 1.0);
  CHECK(p.beta / scale > 1.0);
  CHECK(p.beta / scale < 100.0);
  CHECK(p.alpha / scale < 1e4);

  KaonParams zeroed = p;
  zeroed.alpha = zeroed.beta = zeroed.gamma = 0.0;
  const auto times = tau_grid(p, 20.0, 50);
  const auto a = asymmetry_dm(zeroed, times);
  const auto b = asymmetry_dm(KaonParams{}, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(*a[k] == *b[k]);
  }
}

TEST_CASE("pure K_S decays as a single exponential") {
  KaonParams p;
  p.epsilon = 0.0;
  const auto times = tau_grid(p, 10.0, 41);
  const auto states = evolve_kaon(p, KaonState::from_ket(k_short(p)), times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(std::abs(states[k].trace() - std::exp(-p.gamma_s * times[k])) < 1e-12);
  }
}

TEST_CASE("trace never increases and states stay positive") {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    KaonParams p;
    p.alpha = 0.2 * p.gamma_s * u(gen) + 1e-20;
    p.gamma = 0.2 * p.gamma_s * u(gen) + 1e-20;
    p.beta = 0.9 * std::sqrt(p.alpha * p.gamma) * (2.0 * u(gen) - 1.0);
    p.epsilon = Complex(0.01 * u(gen), 0.01 * u(gen));
    const auto times = tau_grid(p, 20.0, 81);
    for (const auto& psi : {k0(), k0bar(), kaon::k1(), kaon::k2()}) {
      const auto states = evolve_kaon(p, KaonState::from_ket(psi), times);
      for (std::size_t k = 1; k < states.size(); ++k) {
        CHECK(states[k].trace() <= states[k - 1].trace() * (1.0 + 1e-12));
        CHECK(states[k].min_eigenvalue() >= -1e-9 * states[k].trace());
      }
    }
  }
}

TEST_CASE("decoherence lowers normalized purity") {
  KaonParams quantum;
  KaonParams damped;
  damped.alpha = damped.gamma = 0.1 * damped.gamma_s;
  const auto times = tau_grid(quantum, 20.0, 200);
  const auto a = evolve_kaon(quantum, KaonState::from_ket(k0()), times);
  const auto b = evolve_kaon(damped, KaonState::from_ket(k0()), times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(normalized_purity(b[k]) <= normalized_purity(a[k]) + 1e-12);
  }
  CHECK(normalized_purity(b.back()) < normalized_purity(a.back()) - 1e-3);
}

TEST_CASE("rates") {
  const KaonState tagged = KaonState::from_ket(k0());
  CHECK(std::abs(rate(tagged, observable_lepton_plus()) - 1.0) < 1e-15);
  CHECK(std::abs(rate(tagged, observable_2pi()) - 0.5) < 1e-15);
  CHECK(std::abs(rate(tagged, observable_lepton_minus())) < 1e-15);

  const KaonState other = KaonState::from_ket(kaon::k2());
  KaonState mix;
  mix.pauli = 0.3 * tagged.pauli + 0.6 * other.pauli;
  const Eigen::Matrix2cd o = observable_2pi() + 0.2 * observable_lepton_plus();
  CHECK(std::abs(rate(mix, o) - (0.3 * rate(tagged, o) + 0.6 * rate(other, o))) < 1e-15);

  Eigen::Matrix2cd bad = Eigen::Matrix2cd::Zero();
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(rate(tagged, bad), ArgumentError);
}

TEST_CASE("pauli components round trip") {
  const KaonState s = KaonState::from_ket(Eigen::Vector2cd(Complex(0.6, 0.1), Complex(-0.2, 0.7)));
  CHECK((KaonState::from_matrix(s.matrix()).pauli - s.pauli).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(s.min_eigenvalue()) < 1e-15);
}

TEST_CASE("asymmetries without CP violation") {
  KaonParams p;
  p.epsilon = 0.0;
  const auto times = tau_grid(p, 20.0, 400);
  const auto a2pi = asymmetry_2pi(p, times);
  const auto adm = asymmetry_dm(p, times);
  CHECK(*adm.front() == -1.0);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(std::abs(*a2pi[k]) < 1e-12);
    const double t = times[k];
    const double closed = -2.0 * std::exp(-(p.gamma_s + p.gamma_l) * t / 2.0) * std::cos(p.delta_m * t) /
                          (std::exp(-p.gamma_s * t) + std::exp(-p.gamma_l * t));
    CHECK(std::abs(*adm[k] - closed) < 1e-10);
  }
}

TEST_CASE("asymmetries match the amplitude oracle with CP violation") {
  for (Complex eps : {Complex(2.23e-3, 0.0), Complex(1.6e-3, 1.5e-3)}) {
    KaonParams p;
    p.epsilon = eps;
    const AmplitudeOracle oracle(p);
    const auto times = tau_grid(p, 20.0, 400);
    const auto a2pi = asymmetry_2pi(p, times);
    const auto adm = asymmetry_dm(p, times);
    CHECK(*adm.front() == -1.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
      CHECK(std::abs(*a2pi[k] - oracle_a2pi(oracle, times[k])) < 1e-10);
      CHECK(std::abs(*adm[k] - oracle_adm(oracle, times[k])) < 1e-10);
    }
  }
}

TEST_CASE("asymmetries are invariant under rescaling rates against time") {
  KaonParams p = preset_cplear_bounds();
  p.alpha *= 100.0;
  p.gamma *= 1000.0;
  KaonParams scaled = p;
  const double s = 3.0;
  scaled.gamma_s *= s;
  scaled.gamma_l *= s;
  scaled.delta_m *= s;
  scaled.alpha *= s;
  scaled.beta *= s;
  scaled.gamma *= s;
  const auto times = tau_grid(p, 20.0, 60);
  std::vector<double> shrunk(times.size());
  std::transform(times.begin(), times.end(), shrunk.begin(), [&](double t) { return t / s; });
  const auto a = asymmetry_2pi(p, times), b = asymmetry_2pi(scaled, shrunk);
  const auto c = asymmetry_dm(p, times), d = asymmetry_dm(scaled, shrunk);
  for (std::size_t k = 0; k < times.size(); ++k) {
    CHECK(std::abs(*a[k] - *b[k]) < 1e-12);
    CHECK(std::abs(*c[k] - *d[k]) < 1e-12);
  }
}

TEST_CASE("alpha damps the oscillation, gamma feeds the long-lived two-pion rate") {
  KaonParams p;
  const Eigen::Matrix4d qm = build_kaon_generator(p);
  const double g = 0.05 * p.gamma_s;
  const double base = interference_damping(qm);
  CHECK(interference_damping(qm + decoherence_block(g, 0.0, 0.0)) > base + 0.9 * g);
  // With the printed block layout gamma only touches the sigma_3 population
  // mode, so the oscillation damping moves at O(epsilon^2) at most.
  const Eigen::Matrix4d with_gamma = qm + decoherence_block(0.0, 0.0, g);
  CHECK(std::abs(interference_damping(with_gamma) - base) < 1e-4 * g);
  const double t = 15.0 * p.tau_s();
  const Eigen::Vector4d r0 = KaonState::from_ket(k0()).pauli;
  const double plain = rate(KaonState{(qm * t).exp() * r0}, observable_2pi());
  const double fed = rate(KaonState{(with_gamma * t).exp() * r0}, observable_2pi());
  CHECK(fed > 2.0 * plain);
}

TEST_CASE("A_dm responds more to alpha than to gamma at its extrema") {
  KaonParams base;
  base.alpha = base.gamma = 0.05 * base.gamma_s;
  const double h = 1e-4 * base.gamma_s;
  const auto times = tau_grid(base, 20.0, 2001);
  const auto curve = asymmetry_dm(base, times);
  auto at = [&](double da, double dg, double t) {
    KaonParams p = base;
    p.alpha += da;
    p.gamma += dg;
    const double grid[] = {0.0, t};
    return *asymmetry_dm(p, grid)[1];
  };
  int extrema = 0;
  for (std::size_t k = 1; k + 1 < times.size(); ++k) {
    if ((*curve[k] - *curve[k - 1]) * (*curve[k + 1] - *curve[k]) < 0.0) {
      const double t = times[k];
      const double d_alpha = (at(h, 0.0, t) - at(-h, 0.0, t)) / (2.0 * h);
      const double d_gamma = (at(0.0, h, t) - at(0.0, -h, t)) / (2.0 * h);
      CHECK(d_alpha != 0.0);
      CHECK(std::abs(d_alpha) > std::abs(d_gamma));
      ++extrema;
    }
  }
  CHECK(extrema >= 2);
}

TEST_CASE("evolution input validation") {
  KaonParams p;
  const double bad_times[] = {1.0, 2.0};
  CHECK_THROWS_AS(evolve_kaon(p, KaonState::from_ket(k0()), bad_times), ArgumentError);
  KaonState not_positive;
  not_positive.pauli << 1.0, 1.0, 1.0, 0.0;
  const double times[] = {0.0};
  CHECK_THROWS_AS(evolve_kaon(p, not_positive, times), ArgumentError);
}
