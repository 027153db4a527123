#include "dressed/gates.hpp"

#include "dressed/optimize.hpp"
#include "dressed/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dressed {

double gate1q_infidelity(double ratio, int n, Variant variant) {
  if (!(ratio >= 1.0) || !std::isfinite(ratio)) {
    throw ConfigError("gate1q_infidelity: ratio must be >= 1");
  }
  if (n < 1) {
    throw ConfigError("gate1q_infidelity: n must be positive");
  }
  const double omega2 = 1.0;
  const double omega1 = ratio * omega2;
  ControlScheme scheme;
  if (variant == Variant::DoubleDrive) {
    scheme = ControlScheme::double_drive(omega1, omega2, omega1);
  } else if (variant == Variant::CircularDressed) {
    scheme = ControlScheme::circular(omega1, omega2, omega1);
  } else {
    throw ConfigError("gate1q_infidelity: variant must be double or circular");
  }
  const double t_gate = kPi / n / omega2;
  const auto h = rotating_frame_hamiltonian(scheme);
  const double rate = omega1 + 2.0 * omega2;
  const int steps = std::max(200, static_cast<int>(std::ceil(t_gate * rate / 0.01)));
  const Eigen::Matrix2cd u1 = magnus4_evolve(h.field, 0.0, t_gate, steps);
  // second frame: exp(+i omega1 t sigma_x / 2)
  const Eigen::Matrix2cd u2 = su2_exp(Field3(-omega1, 0.0, 0.0), t_gate) * u1;
  const Eigen::Matrix2cd ideal = su2_exp(Field3(0.0, 1.0, 0.0), kPi / n);
  return std::max(0.0, 1.0 - average_gate_fidelity(ideal, u2));
}

void IonGateConfig::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw ConfigError("IonGateConfig: nu must be positive");
  }
  if (!(eta > 0.0 && eta < 1.0)) {
    throw ConfigError("IonGateConfig: eta must lie in (0, 1)");
  }
  if (!(omega1 >= 0.0) || !std::isfinite(omega1)) {
    throw ConfigError("IonGateConfig: omega1 must be non-negative");
  }
  if (!(omega2 >= 0.0) || !std::isfinite(omega2)) {
    throw ConfigError("IonGateConfig: omega2 must be non-negative");
  }
  if (s != 0 && s != 1) {
    throw ConfigError("IonGateConfig: s must be 0 or 1");
  }
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
    throw ConfigError("IonGateConfig: nbar must be >= 0");
  }
  if (n_fock < 10) {
    throw ConfigError("IonGateConfig: n_fock must be >= 10");
  }
  if (!(t_gate_hint >= 0.0)) {
    throw ConfigError("IonGateConfig: t_gate_hint must be >= 0");
  }
  if (steps_per_period < 8) {
    throw ConfigError("IonGateConfig: steps_per_period must be >= 8");
  }
}

TimeDependentHamiltonian ion_gate_hamiltonian(const IonGateConfig& cfg) {
  cfg.validate();
  const Index nf = cfg.n_fock;
  const Operator i2 = Operator::Identity(2, 2);
  const Operator iff = Operator::Identity(nf, nf);
  const Operator b = annihilation(nf);
  const Operator x = b + b.adjoint();
  auto on1 = [&](const Operator& a) { return kron_all({a, i2, iff}); };
  auto on2 = [&](const Operator& a) { return kron_all({i2, a, iff}); };
  const Operator sz = on1(sigma_z()) + on2(sigma_z());
  const Operator sx = on1(sigma_x()) + on2(sigma_x());
  const Operator sy = on1(sigma_y()) + on2(sigma_y());
  const Operator xm = kron_all({i2, i2, x});
  const Operator num = kron_all({i2, i2, Operator(b.adjoint() * b)});

  const double o1 = cfg.resolved_omega1();
  const double o2 = cfg.omega2;
  const Operator h_static = cfg.nu * num + (0.5 * cfg.eta * cfg.nu) * (sz * xm) + (0.5 * o1) * sx;
  const Operator h_cos = (-0.5 * o2) * sz;
  const Operator h_sin = (0.5 * o2 * cfg.s) * sy;

  TimeDependentHamiltonian h;
  h.dim = 4 * nf;
  h.period = kTwoPi / o1;
  h.eval = [h_static, h_cos, h_sin, o1](double t) -> Operator {
    return h_static + std::cos(o1 * t) * h_cos + std::sin(o1 * t) * h_sin;
  };
  return h;
}

Eigen::Matrix2cd zyz_rotation(double a, double b, double c) {
  return su2_exp(Field3(0, 0, a), 1.0) * su2_exp(Field3(0, b, 0), 1.0) * su2_exp(Field3(0, 0, c), 1.0);
}

namespace {

Ket bell_phi_plus() {
  Ket v = Ket::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return v;
}

double bell_overlap(const Operator& rho, const std::array<double, 6>& a) {
  const Eigen::Matrix4cd r = kron(zyz_rotation(a[0], a[1], a[2]), zyz_rotation(a[3], a[4], a[5]));
  const Ket v = r * bell_phi_plus();
  return (v.adjoint() * rho * v)(0, 0).real();
}

} // namespace

void maximize_bell_fidelity(const Operator& rho, GateResult& out) {
  if (rho.rows() != 4 || rho.cols() != 4) {
    throw ConfigError("maximize_bell_fidelity: expected a two-qubit density matrix");
  }
  out.identity_fidelity = bell_overlap(rho, {});
  out.fidelity = out.identity_fidelity;
  out.optimizer_angles = {};
  NelderMeadOptions opts;
  opts.initial_step = 0.3;
  opts.f_tol = 1e-13;
  opts.x_tol = 1e-9;
  // 8 lattice starts: polar angles of both qubits and one azimuth
  for (int k = 0; k < 8; ++k) {
    const double b1 = (k & 1) ? 3 * kPi / 4 : kPi / 4;
    const double b2 = (k & 2) ? 3 * kPi / 4 : kPi / 4;
    const double a1 = (k & 4) ? kPi : 0.0;
    const std::vector<double> x0{a1, b1, 0.0, 0.0, b2, a1};
    const auto res = nelder_mead(
        [&](const std::vector<double>& x) {
          return -bell_overlap(rho, {x[0], x[1], x[2], x[3], x[4], x[5]});
        },
        x0, opts);
    if (-res.value > out.fidelity) {
      out.fidelity = -res.value;
      std::copy(res.x.begin(), res.x.end(), out.optimizer_angles.begin());
    }
  }
  out.infidelity = 1.0 - out.fidelity;
}

namespace {

// U(t) = U(0 -> tau) M^n with tau = t - n T; partials on the Magnus grid.
class GatePropagator {
public:
  explicit GatePropagator(const TimeDependentHamiltonian& h, int steps)
      : h_(h), steps_(steps), dt_(h.period / steps), partial_(static_cast<std::size_t>(steps) + 1) {
    partial_[0] = Operator::Identity(h.dim, h.dim);
    for (int k = 0; k < steps; ++k) {
      partial_[k + 1] = magnus4_step(h, k * dt_, dt_) * partial_[k];
    }
    power_.emplace(partial_.back());
  }

  Operator at(double t) const {
    const double period = h_.period;
    const auto n = static_cast<long long>(std::floor(t / period));
    const double tau = t - n * period;
    const int j = std::min(steps_ - 1, static_cast<int>(std::floor(tau / dt_)));
    const double rest = tau - j * dt_;
    Operator u = partial_[j];
    if (rest > 0.0) {
      u = magnus4_step(h_, j * dt_, rest) * u;
    }
    return u * power_->pow(n);
  }

private:
  const TimeDependentHamiltonian& h_;
  int steps_;
  double dt_;
  std::vector<Operator> partial_;
  std::optional<UnitaryPower> power_;
};

struct FinalState {
  Operator rho2;
  Eigen::VectorXd fock_populations;
};

FinalState evolve_thermal(const Operator& u, const std::vector<double>& p, Index nf) {
  // columns sqrt(p_n) U (|++> (x) |n>)
  Operator v(4 * nf, nf);
  for (Index n = 0; n < nf; ++n) {
    v.col(n) = 0.5 * std::sqrt(p[static_cast<std::size_t>(n)]) *
               (u.col(n) + u.col(nf + n) + u.col(2 * nf + n) + u.col(3 * nf + n));
  }
  FinalState out;
  out.rho2 = Operator::Zero(4, 4);
  out.fock_populations = Eigen::VectorXd::Zero(nf);
  for (Index q = 0; q < 4; ++q) {
    for (Index r = 0; r < 4; ++r) {
      out.rho2(q, r) = (v.middleRows(q * nf, nf).cwiseProduct(v.middleRows(r * nf, nf).conjugate())).sum();
    }
    out.fock_populations += v.middleRows(q * nf, nf).rowwise().squaredNorm();
  }
  return out;
}

} // namespace

GateResult gate2q_simulate(const IonGateConfig& cfg) {
  const TimeDependentHamiltonian h = ion_gate_hamiltonian(cfg);
  const Index nf = cfg.n_fock;
  const ThermalState th = thermal_oscillator_state(cfg.nbar, nf);
  std::vector<double> p(static_cast<std::size_t>(nf));
  for (Index n = 0; n < nf; ++n) {
    p[static_cast<std::size_t>(n)] = th.state.density(n, n).real();
  }
  const GatePropagator prop(h, cfg.steps_per_period);
  auto purity = [&](double t) {
    const Operator rho = evolve_thermal(prop.at(t), p, nf).rho2;
    return (rho * rho).trace().real();
  };

  // coarse scan resolves the fast drive-period ripple, golden section refines
  const double hint = cfg.resolved_t_gate();
  const double lo = 0.96 * hint, hi = 1.04 * hint;
  const int coarse = std::max(64, static_cast<int>(std::ceil(8.0 * (hi - lo) / h.period)));
  double best_t = lo, best_p = -1.0;
  for (int k = 0; k <= coarse; ++k) {
    const double t = lo + (hi - lo) * k / coarse;
    const double pur = purity(t);
    if (pur > best_p) {
      best_p = pur;
      best_t = t;
    }
  }
  const double step = (hi - lo) / coarse;
  const ScalarMinimum m = golden_section([&](double t) { return -purity(t); }, std::max(lo, best_t - step),
                                         std::min(hi, best_t + step), 1e-6 * step);
  if (-m.value > best_p) {
    best_t = m.x;
  }

  const FinalState fs = evolve_thermal(prop.at(best_t), p, nf);
  const double top = fs.fock_populations(nf - 1) + fs.fock_populations(nf - 2);
  if (top > 1e-6) {
    throw NumericalError("gate2q_simulate: Fock truncation leakage " + std::to_string(top) +
                         " in the top two levels; increase n_fock above " + std::to_string(nf));
  }
  GateResult out;
  out.optimal_t_gate = best_t;
  out.rho = fs.rho2;
  out.purity = (fs.rho2 * fs.rho2).trace().real();
  maximize_bell_fidelity(fs.rho2, out);
  return out;
}

std::vector<GateScanRow> gate2q_scan(const IonGateConfig& cfg, const std::vector<double>& omega2_grid, int threads) {
  cfg.validate();
  const double o1 = cfg.resolved_omega1();
  for (double o2 : omega2_grid) {
    if (!(o2 > 0.0) || !(o2 < cfg.nu + o1)) {
      throw ConfigError("gate2q_scan: omega2 grid values must lie in (0, nu + omega1)");
    }
  }
  std::vector<GateScanRow> rows(omega2_grid.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].omega2 = omega2_grid[i];
  }
  parallel_for(2 * omega2_grid.size(), resolve_threads(threads), [&](std::size_t k) {
    const std::size_t i = k / 2;
    IonGateConfig c = cfg;
    c.omega2 = omega2_grid[i];
    c.s = static_cast<int>(k % 2);
    try {
      GateResult r = gate2q_simulate(c);
      (c.s == 0 ? rows[i].s0 : rows[i].s1) = std::move(r);
    } catch (const NumericalError& e) {
      throw NumericalError("gate2q_scan: omega2 = " + std::to_string(c.omega2) + ", s = " + std::to_string(c.s) +
                           ": " + e.what());
    }
  });
  return rows;
}

} // namespace dressed
