#include "dressed/propagation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace dressed {

namespace {

constexpr double kGaussOffset = 0.28867513459481288225; // sqrt(3)/6
constexpr double kMagnusCommutator = 0.14433756729740644113; // sqrt(3)/12

Operator checked_eval(const TimeDependentHamiltonian& h, double t) {
  Operator m = h.eval(t);
  if (!m.allFinite()) {
    throw NumericalError("non-finite Hamiltonian at t = " + std::to_string(t));
  }
  return m;
}

Field3 checked_field(const std::function<Field3(double)>& field, double t) {
  Field3 f = field(t);
  if (!f.allFinite()) {
    throw NumericalError("non-finite Hamiltonian at t = " + std::to_string(t));
  }
  return f;
}

} // namespace

Eigen::Matrix2cd magnus4_step(const std::function<Field3(double)>& field, double t0, double dt) {
  const Field3 h1 = checked_field(field, t0 + (0.5 - kGaussOffset) * dt);
  const Field3 h2 = checked_field(field, t0 + (0.5 + kGaussOffset) * dt);
  const Field3 k = 0.5 * dt * (h1 + h2) + kMagnusCommutator * dt * dt * h2.cross(h1);
  return su2_exp(k, 1.0);
}

Operator magnus4_step(const TimeDependentHamiltonian& h, double t0, double dt) {
  if (h.is_qubit_field()) {
    return Operator(magnus4_step(h.field, t0, dt));
  }
  const Operator h1 = checked_eval(h, t0 + (0.5 - kGaussOffset) * dt);
  const Operator h2 = checked_eval(h, t0 + (0.5 + kGaussOffset) * dt);
  const Complex i(0.0, 1.0);
  Operator k = 0.5 * dt * (h1 + h2) - i * (kMagnusCommutator * dt * dt) * (h2 * h1 - h1 * h2);
  k = 0.5 * (k + k.adjoint()).eval();
  return expm_hermitian(k, 1.0);
}

Eigen::Matrix2cd magnus4_evolve(const std::function<Field3(double)>& field, double t0, double t1, int steps) {
  if (steps < 1) {
    throw ConfigError("magnus4_evolve: steps must be >= 1");
  }
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  const double dt = (t1 - t0) / steps;
  for (int k = 0; k < steps; ++k) {
    u = magnus4_step(field, t0 + k * dt, dt) * u;
  }
  return u;
}

Operator magnus4_evolve(const TimeDependentHamiltonian& h, double t0, double t1, int steps) {
  if (steps < 1) {
    throw ConfigError("magnus4_evolve: steps must be >= 1");
  }
  if (h.is_qubit_field()) {
    return Operator(magnus4_evolve(h.field, t0, t1, steps));
  }
  Operator u = Operator::Identity(h.dim, h.dim);
  const double dt = (t1 - t0) / steps;
  for (int k = 0; k < steps; ++k) {
    u = magnus4_step(h, t0 + k * dt, dt) * u;
  }
  return u;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct DirectIntegrator {
  const TimeDependentHamiltonian& h;
  double tol;
  double min_step;

  Operator rhs(double t, const Operator& u) const {
    return Complex(0.0, -1.0) * (checked_eval(h, t) * u);
  }

  // Integrates u from t0 to t1 in place; returns the last accepted step size.
  double advance(Operator& u, double t0, double t1, double h_guess,
                 std::vector<std::pair<double, Operator>>* checkpoints) const {
    double t = t0;
    double step = h_guess > 0.0 ? h_guess : initial_step(t0, t1);
    Operator k1 = rhs(t, u);
    const Index n = u.rows();
    const Operator identity = Operator::Identity(n, n);
    while (t < t1) {
      const bool last = t + step >= t1;
      if (last) {
        step = t1 - t;
      }
      const Operator k2 = rhs(t + c2 * step, u + step * (a21 * k1));
      const Operator k3 = rhs(t + c3 * step, u + step * (a31 * k1 + a32 * k2));
      const Operator k4 = rhs(t + c4 * step, u + step * (a41 * k1 + a42 * k2 + a43 * k3));
      const Operator k5 = rhs(t + c5 * step, u + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      const Operator k6 =
          rhs(t + step, u + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      Operator next = u + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const Operator k7 = rhs(t + step, next);
      const Operator err_vec = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double err = 0.0;
      for (Index i = 0; i < err_vec.size(); ++i) {
        err = std::max(err, std::abs(err_vec(i)) / (tol * (1.0 + std::abs(next(i)))));
      }
      if (!std::isfinite(err)) {
        throw NumericalError("propagate_direct: non-finite error estimate at t = " + std::to_string(t));
      }
      if (err <= 1.0) {
        t = last ? t1 : t + step;
        if (max_abs_diff(next.adjoint() * next, identity) > 10.0 * tol) {
          next = unitarize(next);
        }
        u = std::move(next);
        k1 = last ? k7 : rhs(t, u);
        if (checkpoints != nullptr) {
          checkpoints->emplace_back(t, u);
        }
        if (last) {
          break;
        }
      }
      const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      step *= std::clamp(factor, 0.2, 5.0);
      if (step < min_step * std::max(1.0, std::abs(t))) {
        throw NumericalError("propagate_direct: step size underflow at t = " + std::to_string(t));
      }
    }
    return step;
  }

  double initial_step(double t0, double t1) const {
    const Operator h0 = checked_eval(h, t0);
    const double scale = h0.cwiseAbs().rowwise().sum().maxCoeff();
    const double span = std::abs(t1 - t0);
    if (scale <= 0.0) {
      return span > 0.0 ? span : 1.0;
    }
    return std::min(span > 0.0 ? span : 1.0, 0.05 / scale);
  }
};

} // namespace

Propagator propagate_direct(const TimeDependentHamiltonian& h, double t_final, double tol, double t_start) {
  if (!(t_final >= t_start)) {
    throw ConfigError("propagate_direct: t_final must be >= t_start");
  }
  if (!(tol > 0.0)) {
    throw ConfigError("propagate_direct: tol must be positive");
  }
  auto checkpoints = std::make_shared<std::vector<std::pair<double, Operator>>>();
  const DirectIntegrator integrator{h, tol, 1e-15};
  Operator u = Operator::Identity(h.dim, h.dim);
  checkpoints->emplace_back(t_start, u);
  if (t_final > t_start) {
    integrator.advance(u, t_start, t_final, 0.0, checkpoints.get());
  }
  auto at = [h, tol, t_start, checkpoints](double t) -> Operator {
    if (t < t_start) {
      throw ConfigError("Propagator::at: t precedes the start time");
    }
    auto it = std::upper_bound(checkpoints->begin(), checkpoints->end(), t,
                               [](double value, const auto& cp) { return value < cp.first; });
    const auto& [tc, uc] = *std::prev(it);
    if (tc == t) {
      return uc;
    }
    const DirectIntegrator local{h, tol, 1e-15};
    Operator u = Operator::Identity(h.dim, h.dim);
    local.advance(u, tc, t, 0.0, nullptr);
    return u * uc;
  };
  return Propagator(PropagationMethod::Direct, std::move(at));
}

Operator monodromy(const TimeDependentHamiltonian& h, int substeps) {
  if (!(h.period > 0.0)) {
    throw ConfigError("monodromy: Hamiltonian is not periodic");
  }
  return magnus4_evolve(h, 0.0, h.period, substeps);
}

UnitaryPower::UnitaryPower(const Operator& m) {
  if (m.rows() != m.cols()) {
    throw ConfigError("UnitaryPower: matrix must be square");
  }
  Eigen::ComplexSchur<Operator> schur(m);
  q_ = schur.matrixU();
  const Operator& t = schur.matrixT();
  phases_.resize(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    phases_(i) = std::arg(t(i, i));
  }
}

Operator UnitaryPower::pow(long long n) const {
  Ket d(phases_.size());
  for (Index i = 0; i < phases_.size(); ++i) {
    d(i) = std::polar(1.0, static_cast<double>(n) * phases_(i));
  }
  return q_ * d.asDiagonal() * q_.adjoint();
}

Propagator stroboscopic(const TimeDependentHamiltonian& h, std::span<const double> times, int phases_per_period,
                        int substeps_per_phase) {
  if (!(h.period > 0.0)) {
    throw ConfigError("stroboscopic: Hamiltonian is not periodic");
  }
  if (phases_per_period < 1 || substeps_per_phase < 1) {
    throw ConfigError("stroboscopic: phases and substeps must be >= 1");
  }
  if (!std::is_sorted(times.begin(), times.end())) {
    throw ConfigError("stroboscopic: times must be sorted ascending");
  }
  const double period = h.period;
  const double slot = period / phases_per_period;
  auto partial = std::make_shared<std::vector<Operator>>();
  partial->reserve(static_cast<std::size_t>(phases_per_period) + 1);
  partial->push_back(Operator::Identity(h.dim, h.dim));
  for (int s = 0; s < phases_per_period; ++s) {
    partial->push_back(magnus4_evolve(h, s * slot, (s + 1) * slot, substeps_per_phase) * partial->back());
  }
  auto power = std::make_shared<UnitaryPower>(partial->back());

  auto evaluate = [h, period, slot, phases_per_period, substeps_per_phase, partial, power](double t) {
    if (t < 0.0) {
      throw ConfigError("stroboscopic: negative time");
    }
    const auto n = static_cast<long long>(std::floor(t / period));
    const double tau = t - static_cast<double>(n) * period;
    int s = std::min(static_cast<int>(std::floor(tau / slot)), phases_per_period);
    const double rem = tau - s * slot;
    Operator u_tau = (*partial)[static_cast<std::size_t>(s)];
    if (rem > 1e-15 * period) {
      const int steps = std::max(1, static_cast<int>(std::ceil(rem / slot * substeps_per_phase)));
      u_tau = magnus4_evolve(h, s * slot, tau, steps) * u_tau;
    }
    return Operator(u_tau * power->pow(n));
  };

  auto cache = std::make_shared<std::vector<std::pair<double, Operator>>>();
  cache->reserve(times.size());
  for (double t : times) {
    cache->emplace_back(t, evaluate(t));
  }
  auto at = [evaluate, cache](double t) -> Operator {
    auto it = std::lower_bound(cache->begin(), cache->end(), t,
                               [](const auto& cp, double value) { return cp.first < value; });
    if (it != cache->end() && it->first == t) {
      return it->second;
    }
    return evaluate(t);
  };
  return Propagator(PropagationMethod::Stroboscopic, std::move(at));
}

QubitStroboscopic::QubitStroboscopic(std::function<Field3(double)> field, double period, int phases_per_period,
                                     int substeps_per_phase)
    : field_(std::move(field)), period_(period), phases_(phases_per_period), substeps_(substeps_per_phase) {
  if (!(period_ > 0.0) || phases_ < 1 || substeps_ < 1) {
    throw ConfigError("QubitStroboscopic: invalid period or step counts");
  }
  const double slot = period_ / phases_;
  partial_.reserve(static_cast<std::size_t>(phases_) + 1);
  partial_.push_back(Eigen::Matrix2cd::Identity());
  for (int s = 0; s < phases_; ++s) {
    partial_.push_back(magnus4_evolve(field_, s * slot, (s + 1) * slot, substeps_) * partial_.back());
  }
  Eigen::ComplexSchur<Eigen::Matrix2cd> schur(partial_.back());
  q_ = schur.matrixU();
  phi_ << std::arg(schur.matrixT()(0, 0)), std::arg(schur.matrixT()(1, 1));
}

Eigen::Matrix2cd QubitStroboscopic::power(long long n) const {
  const double dn = static_cast<double>(n);
  const Complex d0 = std::polar(1.0, dn * phi_(0));
  const Complex d1 = std::polar(1.0, dn * phi_(1));
  return q_ * Eigen::Vector2cd(d0, d1).asDiagonal() * q_.adjoint();
}

Eigen::Matrix2cd QubitStroboscopic::at_grid(long long n, int s) const {
  return partial_[static_cast<std::size_t>(s)] * power(n);
}

Eigen::Matrix2cd QubitStroboscopic::at(double t) const {
  const double slot = period_ / phases_;
  const auto n = static_cast<long long>(std::floor(t / period_));
  const double tau = t - static_cast<double>(n) * period_;
  const int s = std::min(static_cast<int>(std::floor(tau / slot)), phases_);
  const double rem = tau - s * slot;
  Eigen::Matrix2cd u = partial_[static_cast<std::size_t>(s)];
  if (rem > 1e-15 * period_) {
    const int steps = std::max(1, static_cast<int>(std::ceil(rem / slot * substeps_)));
    u = magnus4_evolve(field_, s * slot, tau, steps) * u;
  }
  return u * power(n);
}

} // namespace dressed
