#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "dressed/floquet.hpp"
#include "dressed/propagation.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace dressed;

namespace {

const double kSigma = 0.005;
const ControlScheme kScheme = ControlScheme::circular(1.574 / std::sqrt(kSigma), 2.353);

// Exact quasi-energy gap from the eigenphases of the second-frame monodromy,
// taken on the branch closest to the unperturbed gap |z|.
double monodromy_gap(const ControlScheme& c, const NoiseRealization& n) {
  const auto h = doubly_rotating_fourier(c, n);
  const Operator m = monodromy(h, 4096);
  Eigen::ComplexEigenSolver<Operator> es(m);
  const double t = h.period;
  const double w = c.mod_freq;
  const double raw = (std::arg(es.eigenvalues()(0)) - std::arg(es.eigenvalues()(1))) / t;
  const double z = std::hypot(c.mod_freq - c.omega1, c.omega2);
  double best = raw;
  for (int k = -3; k <= 3; ++k) {
    for (double s : {1.0, -1.0}) {
      const double cand = s * raw + k * w;
      if (std::abs(cand - z) < std::abs(best - z)) {
        best = cand;
      }
    }
  }
  return best;
}

} // namespace

TEST_CASE("truncation dimension") {
  CHECK((FloquetConfig{4, 2, 2}.truncation_dim() == 18));
  CHECK((FloquetConfig{2, 2, 2}.truncation_dim() == 10));
  CHECK((FloquetConfig{3, 2, 2}.truncation_dim() == 10));
  CHECK((FloquetConfig{4, 1, 2}.truncation_dim() == 10));
  CHECK_THROWS_AS((FloquetConfig{5, 2, 2}.validate()), ConfigError);
}

TEST_CASE("unperturbed structure") {
  const auto h = doubly_rotating_fourier(kScheme, {});
  const FloquetModel m = build_floquet_hamiltonian(h);
  const double az = std::abs(m.z);
  CHECK(az == doctest::Approx(std::hypot(kScheme.mod_freq - kScheme.omega1, kScheme.omega2)));
  CHECK(is_unitary(m.u0, 1e-12));
  const Operator d = m.u0.adjoint() * h.fourier->unperturbed * m.u0;
  CHECK(max_abs_diff(d, -0.5 * az * sigma_z()) < 1e-12);
  Eigen::SelfAdjointEigenSolver<Operator> es(h.fourier->unperturbed);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-0.5 * az));
  CHECK(es.eigenvalues()(1) == doctest::Approx(0.5 * az));

  REQUIRE(m.h_f.rows() == 18);
  for (Index i = 0; i < 18; ++i) {
    for (Index j = 0; j < 18; ++j) {
      if (i != j) {
        CHECK(std::abs(m.h_f(i, j)) < 1e-12);
      }
    }
    const int block = static_cast<int>(i / 2);
    const double expect = (i % 2 == 0 ? -0.5 : 0.5) * az + (4 - block) * kScheme.mod_freq;
    CHECK(m.h_f(i, i).real() == doctest::Approx(expect));
    CHECK(m.e0(i) == doctest::Approx(expect));
  }
  CHECK(m.lower == 8);
  CHECK(m.upper == 9);
  CHECK(perturbed_gap(m) == doctest::Approx(az).epsilon(1e-14));
}

TEST_CASE("noisy Floquet Hamiltonian blocks") {
  const NoiseRealization n{0.4, 0.01};
  const auto h = doubly_rotating_fourier(kScheme, n);
  const FloquetModel m = build_floquet_hamiltonian(h);
  CHECK(is_hermitian(m.h_f, 1e-12));
  const Operator u0 = m.u0;
  // block (i, j) = V'^(i - j)
  CHECK(max_abs_diff(m.h_f.block(2, 0, 2, 2), u0.adjoint() * h.fourier->components.at(1) * u0) < 1e-14);
  CHECK(max_abs_diff(m.h_f.block(4, 0, 2, 2), u0.adjoint() * h.fourier->components.at(2) * u0) < 1e-14);
  CHECK(max_abs_diff(m.h_f.block(0, 2, 2, 2), u0.adjoint() * h.fourier->components.at(-1) * u0) < 1e-14);
  CHECK(max_abs_diff(m.h_f.block(0, 6, 2, 2), Operator::Zero(2, 2)) == 0.0);
  CHECK_THROWS_AS(build_floquet_hamiltonian(rotating_frame_hamiltonian(kScheme)), ConfigError);
}

TEST_CASE("first order only without off-diagonal coupling") {
  const auto h = doubly_rotating_fourier(kScheme, {0.3, 0.02});
  FloquetModel m = build_floquet_hamiltonian(h);
  const Operator diag = m.h_f.diagonal().asDiagonal();
  m.h_f = diag;
  for (Index n : {m.lower, m.upper}) {
    const auto e = level_corrections(m, n);
    CHECK(e[1] == doctest::Approx((m.h_f(n, n).real() - m.e0(n))));
    CHECK(e[2] == 0.0);
    CHECK(e[3] == 0.0);
    CHECK(e[4] == 0.0);
  }
}

TEST_CASE("fourth-order corrections on a dense random model") {
  // compare against the exact eigenvalue of E0 + lambda V by Richardson-free
  // polynomial fit: E(lambda) - sum_k lambda^k E^(k) = O(lambda^5)
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  FloquetModel m;
  m.frequency = 1.0;
  m.e0.resize(6);
  m.e0 << -2.0, -1.1, 0.0, 0.7, 1.9, 3.2;
  Operator v(6, 6);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = 0; j <= i; ++j) {
      v(i, j) = i == j ? Complex(g(rng), 0) : Complex(g(rng), g(rng));
      v(j, i) = std::conj(v(i, j));
    }
  }
  for (double lambda : {0.02, 0.01}) {
    m.h_f = Operator(m.e0.cast<Complex>().asDiagonal()) + lambda * v;
    Eigen::SelfAdjointEigenSolver<Operator> es(m.h_f);
    const double exact = es.eigenvalues()(2);
    const auto e = level_corrections(m, 2);
    const double pt = e[0] + e[1] + e[2] + e[3] + e[4];
    CHECK(std::abs(exact - pt) < 40.0 * std::pow(lambda, 5));
    const double pt3 = e[0] + e[1] + e[2] + e[3];
    CHECK(std::abs(exact - pt) < std::abs(exact - pt3));
  }
}

TEST_CASE("gap against the monodromy quasi-energies") {
  for (double eps : {1e-2, -1e-2, 5e-3}) {
    const NoiseRealization n{0.0, eps};
    const double pt = perturbed_gap(kScheme, n);
    const double exact = monodromy_gap(kScheme, n);
    CHECK(std::abs(pt - exact) < 1e-6 * kScheme.omega1);
  }
  const NoiseRealization nd{0.3, 0.005};
  CHECK(std::abs(perturbed_gap(kScheme, nd) - monodromy_gap(kScheme, nd)) < 1e-4 * kScheme.omega1);
}

TEST_CASE("order convergence and symmetry") {
  const FloquetConfig k2{2, 2, 2};
  const FloquetConfig k4{4, 2, 2};
  auto diff = [&](double eps) {
    return std::abs(perturbed_gap(kScheme, {0.0, eps}, k4) - perturbed_gap(kScheme, {0.0, eps}, k2));
  };
  CHECK(diff(1e-2) / diff(5e-3) > 4.0 * 0.8);
  for (double d : {0.1, 0.7, 1.4}) {
    CHECK(std::abs(perturbed_gap(kScheme, {d, 0.0}) - perturbed_gap(kScheme, {-d, 0.0})) < 1e-10 * kScheme.omega1);
  }
}

TEST_CASE("Gauss-Hermite rule") {
  const auto [x, w] = gauss_hermite(21);
  double s0 = 0, s2 = 0, s4 = 0, s40 = 0, s41 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s0 += w[i];
    s2 += w[i] * x[i] * x[i];
    s4 += w[i] * std::pow(x[i], 4);
    s40 += w[i] * std::pow(x[i], 40);
    s41 += w[i] * std::pow(x[i], 41);
  }
  double dfact = 1.0; // 39!!
  for (int k = 39; k > 1; k -= 2) {
    dfact *= k;
  }
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s2 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(s4 == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(s40 == doctest::Approx(dfact).epsilon(1e-9));
  CHECK(std::abs(s41) < 1e-9 * dfact);
}

TEST_CASE("gap variance") {
  const GapStatistics zero = gap_variance(kScheme, NoiseModel{});
  CHECK(zero.var_gap == 0.0);
  CHECK(std::isinf(zero.t2_bar));
  CHECK_THROWS_AS(gap_variance(kScheme, NoiseModel{}, 5), ConfigError);

  const NoiseModel noise = NoiseModel::from_t2_star(1.0, kSigma);
  const GapStatistics q = gap_variance(kScheme, noise);
  CHECK(q.t2_bar == doctest::Approx(std::sqrt(2.0 / q.var_gap)));
  // pseudo-random Monte Carlo oracle
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> g;
  const int n = 100000;
  double mean = 0.0, m2 = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double x = perturbed_gap(kScheme, {noise.sigma_delta * g(rng), noise.sigma_eps * g(rng)});
    const double d = x - mean;
    mean += d / k;
    m2 += d * (x - mean);
  }
  const double var_mc = m2 / (n - 1);
  CHECK(std::abs(q.var_gap / var_mc - 1.0) < 0.01);
  // quadrature is converged in the node count
  CHECK(gap_variance(kScheme, noise, 31).var_gap == doctest::Approx(q.var_gap).epsilon(1e-6));
}

TEST_CASE("scaling-ansatz coherence time") {
  CHECK(*t2_app(10.0, 1e-9, kSigma, 1.0) < 1e-6);
  CHECK(*t2_app(10.0, 0.0, kSigma, 1.0) == 0.0);
  CHECK_FALSE(t2_app(std::nan(""), 1.0, kSigma, 1.0));
  // T2* scaling: t2_app(O1, O2, s, T) = T * t2_app(O1 T, O2 T, s, 1)
  CHECK(*t2_app(3.0, 0.4, kSigma, 2.0) == doctest::Approx(2.0 * *t2_app(6.0, 0.8, kSigma, 1.0)));

  const GlobalOptimum opt = global_optimum(kSigma, 1.0);
  for (double s : {0.5, 0.8, 1.25, 2.0}) {
    const double v = *t2_app(opt.omega1 / std::sqrt(s), opt.omega2, kSigma * s, 1.0) * s;
    CHECK(v == doctest::Approx(opt.t2).epsilon(0.01));
  }
}

TEST_CASE("global optimum of the closed form") {
  // Independent oracle: with x = O1^4 s^2 and u = O2^2, sigma T2 =
  // 2 O2 sqrt(x) / sqrt(x^2 + 6x + A(u)), A = 4u^2 - 24u + 48, maximized
  // at x = sqrt(A); the remaining 1-D problem is scanned densely.
  double best = 0.0, best_u = 0.0;
  for (int k = 1; k <= 200000; ++k) {
    const double u = 20.0 * k / 200000.0;
    const double a = 4 * u * u - 24 * u + 48;
    const double v = 2.0 * std::sqrt(u) / std::sqrt(2.0 * std::sqrt(a) + 6.0);
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  const double a = 4 * best_u * best_u - 24 * best_u + 48;
  const double o1_oracle = std::pow(std::sqrt(a), 0.25) / std::sqrt(kSigma);

  const GlobalOptimum opt = global_optimum(kSigma, 1.0);
  CHECK(opt.t2 * kSigma == doctest::Approx(best).epsilon(1e-6));
  CHECK(opt.omega2 == doctest::Approx(std::sqrt(best_u)).epsilon(1e-3));
  CHECK(opt.omega1 == doctest::Approx(o1_oracle).epsilon(1e-3));
  CHECK(opt.t2_single_drive == doctest::Approx(1.25 / std::sqrt(kSigma)));
  CHECK(opt.omega1_single_drive == doctest::Approx(0.6 / std::sqrt(kSigma)));

  const GlobalOptimum x4 = global_optimum(4 * kSigma, 1.0);
  CHECK(x4.t2 == doctest::Approx(opt.t2 / 4).epsilon(0.05));
  for (double s : {0.002, 0.02}) {
    CHECK(global_optimum(s, 1.0).omega2 == doctest::Approx(opt.omega2).epsilon(0.1));
  }
  // T2* = 2 halves the frequencies and doubles T2
  const GlobalOptimum t2 = global_optimum(kSigma, 2.0);
  CHECK(t2.t2 == doctest::Approx(2.0 * opt.t2).epsilon(1e-6));
  CHECK(t2.omega2 == doctest::Approx(0.5 * opt.omega2).epsilon(1e-4));
}

TEST_CASE("constrained optimum along a fixed amplitude ratio") {
  const auto [o1, t2] = constrained_optimum(std::sqrt(2.0), kSigma, 1.0);
  double best = 0.0, best_o1 = 0.0;
  for (int k = 1; k <= 400000; ++k) {
    const double x = 0.005 * k;
    const double v = *t2_app(x, std::sqrt(2.0) * x, kSigma, 1.0);
    if (v > best) {
      best = v;
      best_o1 = x;
    }
  }
  CHECK(o1 == doctest::Approx(best_o1).epsilon(1e-3));
  CHECK(t2 == doctest::Approx(best).epsilon(1e-8));
}
