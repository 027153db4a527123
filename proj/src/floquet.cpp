#include "dressed/floquet.hpp"

#include "dressed/optimize.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <string>

namespace dressed {

void FloquetConfig::validate() const {
  if (order < 0 || order > 4) {
    throw ConfigError("FloquetConfig: order must lie in 0..4");
  }
  if (harmonic < 1 || system_dim < 1) {
    throw ConfigError("FloquetConfig: harmonic and system_dim must be positive");
  }
}

Eigen::Matrix2cd floquet_diagonalizer(Complex z) {
  const Complex phase = z / std::abs(z);
  Eigen::Matrix2cd u;
  u << phase, -phase, 1.0, 1.0;
  return u / std::sqrt(2.0);
}

FloquetModel build_floquet_hamiltonian(const TimeDependentHamiltonian& components, const FloquetConfig& cfg) {
  cfg.validate();
  if (!components.fourier) {
    throw ConfigError("build_floquet_hamiltonian: Fourier components required");
  }
  const FourierDecomposition& f = *components.fourier;
  if (f.unperturbed.rows() != 2 || cfg.system_dim != 2) {
    throw ConfigError("build_floquet_hamiltonian: qubit decomposition required");
  }
  if (f.max_harmonic() > cfg.harmonic) {
    throw ConfigError("build_floquet_hamiltonian: decomposition exceeds the configured harmonic");
  }
  const double w = f.frequency;
  // H^(0) = 1/2 [(O1 - w) sx + O2 sy] = 1/2 [[0, -z], [-conj z, 0]]
  const Complex z = -f.unperturbed(0, 1) * 2.0;
  const double z_min = 1e-9 * std::abs(w);
  if (!(std::abs(z) > z_min)) {
    throw NumericalError("build_floquet_hamiltonian: degenerate unperturbed basis, |z| = " +
                         std::to_string(std::abs(z)));
  }

  FloquetModel model;
  model.z = z;
  model.frequency = w;
  model.u0 = floquet_diagonalizer(z);
  const Operator u0 = model.u0;
  auto prime = [&](int m) -> Operator {
    const auto it = f.components.find(m);
    return it == f.components.end() ? Operator(Operator::Zero(2, 2)) : Operator(u0.adjoint() * it->second * u0);
  };
  const Operator h0p = u0.adjoint() * f.unperturbed * u0;

  const int nb = cfg.blocks();
  const int half = nb / 2;
  const Index dim = cfg.truncation_dim();
  model.h_f = Operator::Zero(dim, dim);
  model.e0.resize(dim);
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j < nb; ++j) {
      const int m = i - j;
      if (std::abs(m) > cfg.harmonic) {
        continue;
      }
      Operator block = prime(m);
      if (i == j) {
        block += h0p + Operator::Identity(2, 2) * static_cast<double>(half - i) * w;
      }
      model.h_f.block(2 * i, 2 * j, 2, 2) = block;
    }
    model.e0(2 * i) = -0.5 * std::abs(z) + (half - i) * w;
    model.e0(2 * i + 1) = 0.5 * std::abs(z) + (half - i) * w;
  }
  model.lower = 2 * half;
  model.upper = 2 * half + 1;
  return model;
}

std::array<double, 5> level_corrections(const FloquetModel& model, Index n, int order) {
  const Index dim = model.h_f.rows();
  if (n < 0 || n >= dim) {
    throw ConfigError("level_corrections: level index out of range");
  }
  std::array<double, 5> e{};
  e[0] = model.e0(n);
  if (order < 1) {
    return e;
  }
  // V_F = H_F - diag(E^(0)); diag(E^(0)) is exactly the unperturbed part.
  Operator v = model.h_f;
  for (Index k = 0; k < dim; ++k) {
    v(k, k) -= model.e0(k);
  }
  const double vnn = v(n, n).real();
  e[1] = vnn;
  if (order < 2) {
    return e;
  }
  const double gap_min = 1e-9 * std::abs(model.frequency);
  // Reduced index set m != n.
  const Index r = dim - 1;
  Ket a(r), b(r);
  Eigen::VectorXd inv(r);
  Operator w(r, r);
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(r));
  for (Index m = 0; m < dim; ++m) {
    if (m != n) {
      idx.push_back(m);
    }
  }
  for (Index p = 0; p < r; ++p) {
    const Index m = idx[static_cast<std::size_t>(p)];
    const double enm = model.e0(n) - model.e0(m);
    if (std::abs(enm) < gap_min) {
      throw NumericalError("perturbation theory: near-degenerate levels (" + std::to_string(n) + ", " +
                           std::to_string(m) + "), E_nm = " + std::to_string(enm));
    }
    inv(p) = 1.0 / enm;
    a(p) = v(n, m) * inv(p);
    b(p) = v(m, n) * inv(p);
    for (Index q = 0; q < r; ++q) {
      w(p, q) = v(m, idx[static_cast<std::size_t>(q)]);
    }
  }
  // sum |V_nm|^2 / E_nm^k
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (Index p = 0; p < r; ++p) {
    const double v2 = std::norm(v(n, idx[static_cast<std::size_t>(p)]));
    s1 += v2 * inv(p);
    s2 += v2 * inv(p) * inv(p);
    s3 += v2 * inv(p) * inv(p) * inv(p);
  }
  e[2] = s1;
  if (order < 3) {
    return e;
  }
  const Ket wb = w * b;
  const Complex triple = a.transpose() * wb; // sum V_nm1 V_m1m2 V_m2n / (E_nm1 E_nm2)
  e[3] = triple.real() - vnn * s2;
  if (order < 4) {
    return e;
  }
  const Ket dwb = inv.cast<Complex>().cwiseProduct(wb);
  const Complex quad = a.transpose() * (w * dwb);       // / (E_nm1 E_nm2 E_nm3)
  const Complex triple_sq = a.transpose() * (w * inv.cast<Complex>().cwiseProduct(b)); // / (E_nm1 E_nm2^2)
  e[4] = quad.real() - e[2] * s2 - 2.0 * vnn * triple_sq.real() + vnn * vnn * s3;
  return e;
}

double perturbed_gap(const FloquetModel& model, const FloquetConfig& cfg) {
  const auto lo = level_corrections(model, model.lower, cfg.order);
  const auto hi = level_corrections(model, model.upper, cfg.order);
  double gap = 0.0;
  for (int k = 0; k <= cfg.order; ++k) {
    gap += hi[static_cast<std::size_t>(k)] - lo[static_cast<std::size_t>(k)];
  }
  return gap;
}

double perturbed_gap(const ControlScheme& scheme, const NoiseRealization& noise, const FloquetConfig& cfg) {
  return perturbed_gap(build_floquet_hamiltonian(doubly_rotating_fourier(scheme, noise), cfg), cfg);
}

std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
  if (n < 1) {
    throw ConfigError("gauss_hermite: order must be >= 1");
  }
  // Jacobi matrix of the probabilists' Hermite recurrence x He_k = He_{k+1} + k He_{k-1}.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    j(k, k - 1) = j(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  std::vector<double> nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
    const double v = es.eigenvectors()(0, k);
    weights[static_cast<std::size_t>(k)] = v * v;
  }
  return {nodes, weights};
}

GapStatistics gap_variance(const ControlScheme& scheme, const NoiseModel& noise, int quad_order,
                           const FloquetConfig& cfg) {
  noise.validate();
  if (quad_order < 9) {
    throw ConfigError("gap_variance: quadrature order must be >= 9");
  }
  const auto [x, wx] = gauss_hermite(quad_order);
  const std::size_t n = x.size();
  std::vector<double> gaps(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const NoiseRealization r{noise.sigma_delta * x[i], noise.sigma_eps * x[j]};
      try {
        gaps[i * n + j] = perturbed_gap(scheme, r, cfg);
      } catch (const NumericalError& e) {
        throw NumericalError("gap_variance: node (delta = " + std::to_string(r.delta) +
                             ", eps = " + std::to_string(r.eps) + "): " + e.what());
      }
    }
  }
  GapStatistics out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out.mean_gap += wx[i] * wx[j] * gaps[i * n + j];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = gaps[i * n + j] - out.mean_gap;
      out.var_gap += wx[i] * wx[j] * d * d;
    }
  }
  // without noise every node holds the same gap; drop the rounding residue
  if (noise.sigma_delta == 0.0 && noise.sigma_eps == 0.0) {
    out.var_gap = 0.0;
  }
  out.var_gap = std::max(out.var_gap, 0.0);
  out.t2_bar = out.var_gap > 0.0 ? std::sqrt(2.0 / out.var_gap) : std::numeric_limits<double>::infinity();
  return out;
}

std::optional<double> t2_app(double omega1, double omega2, double sigma_eps, double t2_star) {
  const double t2 = t2_star * t2_star, t4 = t2 * t2, t8 = t4 * t4;
  const double o1_2 = omega1 * omega1, o1_4 = o1_2 * o1_2, o1_8 = o1_4 * o1_4;
  const double o2_2 = omega2 * omega2, o2_4 = o2_2 * o2_2;
  const double s2 = sigma_eps * sigma_eps, s4 = s2 * s2;
  const double radicand = 4.0 * t4 * o2_4 - 24.0 * t2 * o2_2 + t8 * o1_8 * s4 + 6.0 * t4 * o1_4 * s2 + 48.0;
  if (!(radicand > 0.0)) {
    return std::nullopt;
  }
  return 2.0 * t4 * o1_2 * omega2 / std::sqrt(radicand);
}

GlobalOptimum global_optimum(double sigma_eps, double t2_star) {
  if (!(sigma_eps > 0.0) || !(t2_star > 0.0)) {
    throw ConfigError("global_optimum: sigma_eps and t2_star must be positive");
  }
  // Work in T2*-scaled units with omega1 measured in 1/sqrt(sigma_eps).
  const double root = std::sqrt(sigma_eps);
  auto value = [&](double a, double b) {
    const auto t = t2_app(a / root, b, sigma_eps, 1.0);
    return t ? *t : 0.0;
  };
  double best_a = 1.0, best_b = 1.0, best = -1.0;
  for (int i = 0; i <= 80; ++i) {
    const double a = std::pow(10.0, -2.0 + 4.0 * i / 80.0);
    for (int j = 0; j <= 80; ++j) {
      const double b = std::pow(10.0, -2.0 + 4.0 * j / 80.0);
      const double v = value(a, b);
      if (v > best) {
        best = v;
        best_a = a;
        best_b = b;
      }
    }
  }
  NelderMeadOptions opts;
  opts.initial_step = 0.05;
  opts.f_tol = 1e-15;
  opts.x_tol = 1e-12;
  const auto res = nelder_mead(
      [&](const std::vector<double>& p) { return -value(std::exp(p[0]), std::exp(p[1])); },
      {std::log(best_a), std::log(best_b)}, opts);
  GlobalOptimum out;
  out.omega1 = std::exp(res.x[0]) / root / t2_star;
  out.omega2 = std::exp(res.x[1]) / t2_star;
  out.t2 = -res.value * t2_star;
  out.t2_single_drive = 1.25 * t2_star / root;
  out.omega1_single_drive = 0.6 / (t2_star * root);
  return out;
}

std::pair<double, double> constrained_optimum(double ratio, double sigma_eps, double t2_star) {
  if (!(ratio > 0.0) || !(sigma_eps > 0.0) || !(t2_star > 0.0)) {
    throw ConfigError("constrained_optimum: arguments must be positive");
  }
  auto neg = [&](double log_o1) {
    const double o1 = std::exp(log_o1);
    const auto t = t2_app(o1, ratio * o1, sigma_eps, t2_star);
    return t ? -*t : 0.0;
  };
  const double lo = std::log(1e-3 / t2_star), hi = std::log(1e4 / t2_star);
  // coarse bracket, then golden section
  double best = lo;
  double best_v = neg(lo);
  for (int i = 1; i <= 400; ++i) {
    const double x = lo + (hi - lo) * i / 400.0;
    const double v = neg(x);
    if (v < best_v) {
      best_v = v;
      best = x;
    }
  }
  const double h = (hi - lo) / 400.0;
  const ScalarMinimum m = golden_section(neg, best - h, best + h, 1e-12);
  return {std::exp(m.x), -m.value};
}

} // namespace dressed
