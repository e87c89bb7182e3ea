#include "pnm/measures.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <numbers>

#include "pnm/errors.hpp"
#include "pnm/siv.hpp"

namespace pnm {

NmResult sum_positive_increments(const std::vector<double>& t, const std::vector<double>& d) {
  if (t.size() != d.size()) throw ContractViolation("sum_positive_increments: size mismatch");
  if (t.size() < 16) throw ResolutionError("sum_positive_increments: fewer than 16 samples");
  NmResult r;
  r.samples = t.size();
  r.window = t.back() - t.front();
  bool rising = false;
  double start = 0.0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    const double inc = d[k + 1] - d[k];
    if (inc > 0.0) {
      r.value += inc;
      if (!rising) {
        rising = true;
        start = t[k];
      }
    } else if (rising) {
      rising = false;
      r.intervals.emplace_back(start, t[k]);
    }
  }
  if (rising) r.intervals.emplace_back(start, t.back());
  return r;
}

std::vector<double> trace_distance_series(const Trajectory& traj, const DensityMatrix& rho_ss) {
  std::vector<double> d;
  d.reserve(traj.states.size());
  for (const auto& s : traj.states) d.push_back(trace_distance(s, rho_ss));
  return d;
}

NmResult dynamical_nm(const Trajectory& traj, const DensityMatrix& rho_ss) {
  NmResult r = sum_positive_increments(traj.times, trace_distance_series(traj, rho_ss));
  r.provenance = "dynamical";
  return r;
}

bool ManifoldParams::mu_real() const { return std::isfinite(mu); }

ManifoldParams make_manifold_params(cplx g, int n, double gamma_ph, double n_ph, double gamma_siv,
                                    double n_delta, double rho11_0, cplx rho12_0) {
  if (n < 0) throw ContractViolation("make_manifold_params: negative Fock index");
  ManifoldParams p;
  p.omega_n = g * std::sqrt(static_cast<double>(n) + 1.0);
  p.gamma_big = gamma_ph * (2.0 * n_ph + 1.0) + gamma_siv * (2.0 * n_delta + 1.0);
  p.gamma_1 = gamma_ph * n_ph + gamma_siv * (n_delta + 1.0);
  p.gamma_0 = 0.75 * p.gamma_big;
  const double om2 = std::norm(p.omega_n);
  const double disc = 4.0 * om2 - std::pow(p.gamma_big / 4.0, 2);
  p.mu = disc > 0.0 ? std::sqrt(disc) : std::numeric_limits<double>::quiet_NaN();
  p.rho11_ss = (4.0 * om2 - p.gamma_1 * p.gamma_big) / (8.0 * om2 + p.gamma_big * p.gamma_big);
  p.c1 = rho11_0 - p.rho11_ss;
  if (p.mu_real()) {
    p.c2 = (p.gamma_0 * p.c1 - p.gamma_1 - p.gamma_big * rho12_0.real()) / p.mu;
    p.alpha1 = std::atan(p.c2 / p.c1);
    p.alpha2 = std::numbers::pi -
               std::atan(std::abs((p.mu * p.c1 + p.gamma_0 * p.c2) / (p.mu * p.c2 - p.gamma_0 * p.c1)));
  }
  return p;
}

ManifoldState manifold_rate_rhs(const ManifoldParams& p, const ManifoldState& s) {
  const cplx i(0.0, 1.0);
  const cplx om = p.omega_n;
  const cplx rho21 = std::conj(s.rho12);
  ManifoldState d;
  d.rho11 = (-p.gamma_big * s.rho11 - p.gamma_1 - i * om * rho21 + i * std::conj(om) * s.rho12).real();
  d.rho12 = -0.5 * p.gamma_big * s.rho12 + 2.0 * i * om * s.rho11 - i * om;
  return d;
}

ManifoldState manifold_rate_solution(const ManifoldParams& p, double rho11_0, cplx rho12_0, double t) {
  // x = (rho11, rho12, rho21), x' = M x + b.
  const cplx i(0.0, 1.0);
  const cplx om = p.omega_n;
  Eigen::Matrix3cd m;
  m << -p.gamma_big, i * std::conj(om), -i * om,
       2.0 * i * om, -0.5 * p.gamma_big, 0.0,
       -2.0 * i * std::conj(om), 0.0, -0.5 * p.gamma_big;
  Eigen::Vector3cd b(-p.gamma_1, -i * om, i * std::conj(om));
  Eigen::Vector3cd x0(rho11_0, rho12_0, std::conj(rho12_0));
  Eigen::Vector3cd x;
  if (t == 0.0) {
    x = x0;
  } else {
    // x(t) = e^{Mt} x0 + M^{-1}(e^{Mt} - 1) b, evaluated through the
    // augmented 4x4 exponential so singular M (no dissipation) is fine.
    Eigen::Matrix4cd aug = Eigen::Matrix4cd::Zero();
    aug.topLeftCorner<3, 3>() = m * t;
    aug.topRightCorner<3, 1>() = b * t;
    const Eigen::Matrix4cd e = aug.exp();
    x = e.topLeftCorner<3, 3>() * x0 + e.topRightCorner<3, 1>();
  }
  return {x(0).real(), 0.5 * (x(1) + std::conj(x(2)))};
}

double analytic_trace_distance(const ManifoldParams& p, double t) {
  if (!p.mu_real()) throw RegimeError("analytic_trace_distance: mu is not real");
  return std::abs(p.c1 * std::cos(p.mu * t) + p.c2 * std::sin(p.mu * t)) * std::exp(-p.gamma_0 * t);
}

std::vector<double> analytic_zero_times(const ManifoldParams& p, int count) {
  if (!p.mu_real()) throw RegimeError("analytic_zero_times: mu is not real");
  // f = R cos(mu t - phase) with phase = atan2(C2, C1).
  const double phase = std::atan2(p.c2, p.c1);
  std::vector<double> out;
  for (int k = -2; static_cast<int>(out.size()) < count; ++k) {
    const double t = (phase + std::numbers::pi / 2.0 + k * std::numbers::pi) / p.mu;
    if (t > 0.0) out.push_back(t);
  }
  return out;
}

std::vector<double> analytic_maxima_times(const ManifoldParams& p, int count) {
  if (!p.mu_real()) throw RegimeError("analytic_maxima_times: mu is not real");
  // d/dt [R cos(mu t - phase) e^{-G0 t}] = 0  <=>  tan(mu t - phase) = -G0/mu.
  const double phase = std::atan2(p.c2, p.c1);
  const double shift = std::atan(p.gamma_0 / p.mu);
  std::vector<double> out;
  for (int k = -2; static_cast<int>(out.size()) < count; ++k) {
    const double t = (phase - shift + k * std::numbers::pi) / p.mu;
    if (t > 0.0) out.push_back(t);
  }
  return out;
}

double analytic_nd(const ManifoldParams& p) {
  if (!p.mu_real()) throw RegimeError("analytic_nd: mu is not real");
  const double x = p.gamma_0 * std::numbers::pi / (2.0 * p.mu);
  return 0.25 * std::exp(-p.alpha1 * p.gamma_0 / p.mu) / std::sinh(x);
}

std::array<double, 8> blp_lower_bounds() { return {0, 0, 0, 0, 0, 0, 0, 0}; }

std::array<double, 8> blp_upper_bounds() {
  constexpr double pi = std::numbers::pi;
  return {pi, pi, 2 * pi, 2 * pi, pi, pi, 2 * pi, 2 * pi};
}

bool in_blp_box(const BlpPoint& x) {
  const auto lo = blp_lower_bounds();
  const auto hi = blp_upper_bounds();
  for (std::size_t i = 0; i < 8; ++i) {
    if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
  }
  return true;
}

namespace {

Eigen::Matrix4cd product_state_label(const BlochAngles& x) {
  const cplx orb0 = std::cos(0.5 * x[0]);
  const cplx orb1 = std::polar(std::sin(0.5 * x[0]), x[2]);
  const cplx sp0 = std::cos(0.5 * x[1]);
  const cplx sp1 = std::polar(std::sin(0.5 * x[1]), x[3]);
  Eigen::Vector4cd psi(orb0 * sp0, orb0 * sp1, orb1 * sp0, orb1 * sp1);
  static const Eigen::Matrix4cd u = label_basis();
  const Eigen::Vector4cd v = u.adjoint() * psi;
  return v * v.adjoint();
}

void check_angles(const BlochAngles& x) {
  const auto hi = blp_upper_bounds();
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(x[i] >= 0.0 && x[i] <= hi[i])) {
      throw ContractViolation("Bloch angle outside the box bounds");
    }
  }
}

}  // namespace

DensityMatrix initial_state_from_angles(const BlochAngles& x) {
  check_angles(x);
  return DensityMatrix(CMatrix(product_state_label(x)), "bloch");
}

namespace {

template <typename Visit>
void blp_series(const DynamicalMapTable& maps, const BlochAngles& x1, const BlochAngles& x2,
                Visit&& visit) {
  if (maps.dim != 4) throw ContractViolation("blp_functional: maps must act on the four-level system");
  check_angles(x1);
  check_angles(x2);
  const Eigen::Matrix4cd diff = product_state_label(x1) - product_state_label(x2);
  const Eigen::Matrix<cplx, 16, 1> v0 = Eigen::Map<const Eigen::Matrix<cplx, 16, 1>>(diff.data());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es;
  for (std::size_t k = 0; k < maps.maps.size(); ++k) {
    const Eigen::Matrix<cplx, 16, 1> vk = maps.maps[k] * v0;
    Eigen::Matrix4cd dk = Eigen::Map<const Eigen::Matrix4cd>(vk.data());
    dk = 0.5 * (dk + dk.adjoint()).eval();
    es.compute(dk, Eigen::EigenvaluesOnly);
    visit(k, 0.5 * es.eigenvalues().cwiseAbs().sum());
  }
}

}  // namespace

double blp_functional(const DynamicalMapTable& maps, const BlochAngles& x1, const BlochAngles& x2) {
  double prev = 0.0;
  double acc = 0.0;
  blp_series(maps, x1, x2, [&](std::size_t k, double d) {
    if (k > 0 && d > prev) acc += d - prev;
    prev = d;
  });
  return acc;
}

double blp_functional(const DynamicalMapTable& maps, const BlpPoint& x) {
  return blp_functional(maps, {x[0], x[1], x[2], x[3]}, {x[4], x[5], x[6], x[7]});
}

NmResult blp_result(const DynamicalMapTable& maps, const BlpPoint& x) {
  std::vector<double> d;
  d.reserve(maps.maps.size());
  blp_series(maps, {x[0], x[1], x[2], x[3]}, {x[4], x[5], x[6], x[7]},
             [&](std::size_t, double v) { d.push_back(v); });
  NmResult r = sum_positive_increments(maps.times, d);
  r.provenance = "blp";
  return r;
}

}  // namespace pnm
