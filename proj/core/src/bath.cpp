#include "pnm/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pnm/errors.hpp"
#include "pnm/ode.hpp"
#include "pnm/parallel.hpp"

namespace pnm {

void BathParams::validate() const {
  if (!(j0 >= 0.0) || !std::isfinite(j0)) throw ContractViolation("BathParams: j0 must be non-negative");
  if (!(width > 0.0)) throw ContractViolation("BathParams: width must be positive");
  if (!(center > 0.0)) throw ContractViolation("BathParams: center must be positive");
  if (temperature < 0.0) throw ContractViolation("BathParams: negative temperature");
  if (omega_max < 0.0) throw ContractViolation("BathParams: negative cutoff");
}

EnergySpectrum siv_spectrum(const SivParams& p) {
  const CMatrix u = label_basis();
  return eigensystem(build_siv_hamiltonian(p), &u);
}

CouplingTensors coupling_tensors(const EnergySpectrum& s) {
  const CMatrix sz = tensor(pauli_z(), identity(2));
  const CMatrix sx = tensor(pauli_x(), identity(2));
  CouplingTensors ct;
  ct.a = hermitize(s.states.adjoint() * sz * s.states);
  ct.b = hermitize(s.states.adjoint() * sx * s.states);
  return ct;
}

CouplingTensors coupling_tensors(const SivParams& p) { return coupling_tensors(siv_spectrum(p)); }

double spectral_density(double omega, const BathParams& p) {
  if (omega < 0.0) throw DomainError("spectral_density: negative frequency");
  const double r = omega / p.center;
  const double hw = 0.5 * p.width;
  const double x = omega - p.center;
  return p.j0 * omega * omega * omega / (r * r + 1.0) * hw / (x * x + hw * hw);
}

namespace {

std::vector<double> lorentz_breaks(const BathParams& p) {
  std::vector<double> b{0.0, p.cutoff()};
  for (int k = -8; k <= 8; ++k) {
    const double x = p.center + 0.5 * p.width * k;
    if (x > 0.0 && x < p.cutoff()) b.push_back(x);
  }
  return b;
}

double occupation(double w, double temperature) {
  if (temperature == 0.0 || w <= 0.0) return 0.0;
  return 1.0 / std::expm1(units::kHbarOverKb * w / temperature);
}

double sinc_t(double x, double t) {
  const double xt = x * t;
  if (std::abs(xt) < 1e-6) return t * (1.0 - xt * xt / 6.0);
  return std::sin(xt) / x;
}

}  // namespace

double spectral_integral(const BathParams& p, const QuadOptions& q) {
  p.validate();
  const QuadResult r = gauss_kronrod([&](double w) { return spectral_density(w, p); }, lorentz_breaks(p), q);
  if (!r.converged) {
    throw NumericalError("spectral_integral: quadrature did not converge (error " + std::to_string(r.error) +
                         ", panels " + std::to_string(r.panels) + ")");
  }
  return r.value;
}

double normalize_j0(double target_sum, const BathParams& p) {
  if (!(target_sum > 0.0)) throw ContractViolation("normalize_j0: target must be positive");
  BathParams unit = p;
  unit.j0 = 1.0;
  QuadOptions q;
  q.rel_tol = 1e-12;
  return target_sum / spectral_integral(unit, q);
}

RateSet rate_integrals(double omega, double t, const BathParams& p, const RateOptions& opt) {
  p.validate();
  if (t < 0.0) throw ContractViolation("rate_integrals: negative time");
  RateSet r;
  if (t == 0.0 || p.j0 == 0.0) return r;
  const double wmax = p.cutoff();

  auto breaks_for = [&](double resonance) {
    std::vector<double> b = lorentz_breaks(p);
    const double osc = std::numbers::pi / t;
    if (resonance > 0.0 && resonance < wmax) {
      b.push_back(resonance);
      for (int m = 1; m <= 4; ++m) {
        for (double s : {-1.0, 1.0}) {
          const double x = resonance + s * m * osc;
          if (x > 0.0 && x < wmax) b.push_back(x);
        }
      }
    }
    const double step = 2.0 * osc * opt.panel_scale;
    const auto n = static_cast<long>(std::ceil(wmax / step));
    for (long k = 1; k < n; ++k) b.push_back(wmax * static_cast<double>(k) / static_cast<double>(n));
    return b;
  };

  QuadOptions q;
  q.rel_tol = opt.rel_tol;
  q.max_panels = opt.max_panels;
  // Absolute floor relative to the scale of the rates, so vanishing rates converge.
  q.abs_tol = opt.rel_tol * 1e-3 * 2.0 * p.j0 * std::pow(p.center, 3) * t;

  double in = 0.0;
  if (p.temperature > 0.0) {
    const QuadResult res = gauss_kronrod(
        [&](double w) { return 2.0 * spectral_density(w, p) * occupation(w, p.temperature) * sinc_t(omega + w, t); },
        breaks_for(-omega), q);
    if (!res.converged) throw NumericalError("rate_integrals: n-type kernel did not converge", t);
    in = res.value;
  }
  const QuadResult rp = gauss_kronrod(
      [&](double w) {
        return 2.0 * spectral_density(w, p) * (occupation(w, p.temperature) + 1.0) * sinc_t(omega - w, t);
      },
      breaks_for(omega), q);
  if (!rp.converged) throw NumericalError("rate_integrals: (n+1)-type kernel did not converge", t);
  const double inp = rp.value;

  const double cross = p.cross_mode == CrossMode::kFull ? 1.0 : 0.0;
  r.g11 = r.g22 = in;
  r.g12 = r.g21 = cross * in;
  r.g33 = r.g44 = inp;
  r.g34 = r.g43 = cross * inp;
  return r;
}

double RateTable::Spline::eval(double h, double t) const {
  const std::size_t n = y.size();
  double s = t / h;
  auto k = static_cast<std::size_t>(std::floor(s));
  if (k >= n - 1) k = n - 2;
  const double a = static_cast<double>(k + 1) - s;
  const double b = s - static_cast<double>(k);
  return a * y[k] + b * y[k + 1] + ((a * a * a - a) * m[k] + (b * b * b - b) * m[k + 1]) * h * h / 6.0;
}

RateTable::RateTable(const BathParams& p, std::vector<double> omegas, double t_max, std::size_t points,
                     int threads, const RateOptions& opt)
    : omegas_(std::move(omegas)), t_max_(t_max), cross_(p.cross_mode) {
  if (points < 4 || !(t_max > 0.0)) throw ContractViolation("RateTable: need >= 4 points and t_max > 0");
  h_ = t_max / static_cast<double>(points - 1);
  splines_.resize(omegas_.size());
  const std::size_t n_om = omegas_.size();
  std::vector<RateSet> grid(n_om * points);
  parallel_for(n_om * points, threads, [&](std::size_t idx) {
    const std::size_t w = idx / points;
    const std::size_t k = idx % points;
    grid[idx] = rate_integrals(omegas_[w], h_ * static_cast<double>(k), p, opt);
  });
  for (std::size_t w = 0; w < n_om; ++w) {
    for (int kind = 0; kind < 2; ++kind) {
      Spline& s = splines_[w][static_cast<std::size_t>(kind)];
      s.y.resize(points);
      for (std::size_t k = 0; k < points; ++k) {
        const RateSet& r = grid[w * points + k];
        s.y[k] = kind == 0 ? r.g11 : r.g33;
      }
      // Natural cubic spline second derivatives (Thomas algorithm).
      const std::size_t n = points;
      s.m.assign(n, 0.0);
      std::vector<double> c(n, 0.0), d(n, 0.0);
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rhs = 6.0 * (s.y[i + 1] - 2.0 * s.y[i] + s.y[i - 1]) / (h_ * h_);
        const double denom = 4.0 - c[i - 1];
        c[i] = 1.0 / denom;
        d[i] = (rhs - d[i - 1]) / denom;
      }
      for (std::size_t i = n - 2; i >= 1; --i) {
        s.m[i] = d[i] - c[i] * s.m[i + 1];
        if (i == 1) break;
      }
    }
  }
}

std::size_t RateTable::index_of(double omega) const {
  double scale = 1.0;
  for (double w : omegas_) scale = std::max(scale, std::abs(w));
  for (std::size_t i = 0; i < omegas_.size(); ++i) {
    if (std::abs(omegas_[i] - omega) <= 1e-9 * scale) return i;
  }
  throw ContractViolation("RateTable: frequency not tabulated");
}

RateSet RateTable::at(std::size_t omega_index, double t) const {
  if (t < 0.0 || t > t_max_ * (1.0 + 1e-12)) throw ContractViolation("RateTable: time outside the lattice");
  const auto& sp = splines_.at(omega_index);
  const double in = sp[0].eval(h_, t);
  const double inp = sp[1].eval(h_, t);
  const double cross = cross_ == CrossMode::kFull ? 1.0 : 0.0;
  RateSet r;
  r.g11 = r.g22 = in;
  r.g12 = r.g21 = cross * in;
  r.g33 = r.g44 = inp;
  r.g34 = r.g43 = cross * inp;
  return r;
}

TlmeCoefficients assemble_coefficients(const CouplingTensors& ct, const EnergySpectrum& s,
                                       const std::function<RateSet(double omega)>& rates) {
  TlmeCoefficients c;
  c.gamma.setZero();
  c.omega.setZero();
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      const cplx a = ct.a(i, j), b = ct.b(i, j);
      if (std::abs(a) + std::abs(b) < 1e-14) continue;
      const RateSet r = rates(s.energies(j) - s.energies(i));
      const cplx g = std::norm(a) * (r.g11 + r.g33) + std::norm(b) * (r.g22 + r.g44) +
                     b * std::conj(a) * (r.g12 + r.g34) + std::conj(b) * ct.a(j, i) * (r.g21 + r.g43);
      c.gamma(i, j) = g.real();
    }
  }
  const RateSet r0 = rates(0.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const cplx aii = ct.a(i, i), ajj = ct.a(j, j), bii = ct.b(i, i), bjj = ct.b(j, j);
      const cplx o = aii * std::conj(ajj) * (r0.g11 + r0.g33) + bii * std::conj(bjj) * (r0.g22 + r0.g44) +
                     bii * std::conj(ajj) * (r0.g12 + r0.g34) + bjj * std::conj(aii) * (r0.g21 + r0.g43);
      c.omega(i, j) = o.real();
    }
  }
  return c;
}

CMatrix tlme_apply(const CMatrix& rho, const TlmeCoefficients& c) {
  CMatrix out = CMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      const double g = c.gamma(i, j);
      if (g == 0.0) continue;
      // sigma_ij = |i><j|: rho_jj feeds |i><i|, row and column j decay.
      out(i, i) += g * rho(j, j);
      out.row(j) -= 0.5 * g * rho.row(j);
      out.col(j) -= 0.5 * g * rho.col(j);
    }
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      out(i, j) += (c.omega(i, j) - 0.5 * (c.omega(i, i) + c.omega(j, j))) * rho(i, j);
    }
  }
  return out;
}

CMatrix tlme_generator(const CMatrix& rho, double t, const CouplingTensors& ct, const BathParams& p,
                       const EnergySpectrum& spectrum) {
  if (rho.rows() != 4 || rho.cols() != 4) throw ContractViolation("tlme_generator: expected a 4x4 state");
  const TlmeCoefficients c =
      assemble_coefficients(ct, spectrum, [&](double w) { return rate_integrals(w, t, p); });
  return tlme_apply(rho, c);
}

namespace {

std::vector<double> distinct_frequencies(const EnergySpectrum& s, const CouplingTensors& ct) {
  const double scale = std::max(1.0, s.energies.cwiseAbs().maxCoeff());
  std::vector<double> out{0.0};
  auto add = [&](double w) {
    for (double v : out) {
      if (std::abs(v - w) <= 1e-9 * scale) return;
    }
    out.push_back(w);
  };
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j && std::abs(ct.a(i, j)) + std::abs(ct.b(i, j)) >= 1e-14) add(s.energies(j) - s.energies(i));
    }
  }
  return out;
}

}  // namespace

TlmeModel::TlmeModel(const SivParams& siv, const BathParams& bath, double t_max, std::size_t lattice_points,
                     int threads, const RateOptions& opt)
    : spectrum_(siv_spectrum(siv)),
      tensors_(coupling_tensors(spectrum_)),
      bath_(bath),
      table_(bath, distinct_frequencies(spectrum_, tensors_), t_max, lattice_points, threads, opt) {
  zero_index_ = table_.index_of(0.0);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j && std::abs(tensors_.a(i, j)) + std::abs(tensors_.b(i, j)) >= 1e-14) {
        channels_.emplace_back(i, j);
        channel_omega_.push_back(table_.index_of(spectrum_.energies(j) - spectrum_.energies(i)));
      }
    }
  }
}

TlmeCoefficients TlmeModel::coefficients(double t) const {
  std::vector<RateSet> cache(table_.omegas().size());
  std::vector<bool> have(cache.size(), false);
  return assemble_coefficients(tensors_, spectrum_, [&](double w) {
    const std::size_t k = table_.index_of(w);
    if (!have[k]) {
      cache[k] = table_.at(k, t);
      have[k] = true;
    }
    return cache[k];
  });
}

CMatrix TlmeModel::rhs(const CMatrix& rho, double t) const { return tlme_apply(rho, coefficients(t)); }

Eigen::Matrix<cplx, 16, 16> TlmeModel::superoperator(double t) const {
  const TlmeCoefficients c = coefficients(t);
  Eigen::Matrix<cplx, 16, 16> l;
  for (int q = 0; q < 4; ++q) {
    for (int p = 0; p < 4; ++p) {
      CMatrix e = CMatrix::Zero(4, 4);
      e(p, q) = 1.0;
      const CMatrix col = tlme_apply(e, c);
      l.col(p + 4 * q) = Eigen::Map<const Eigen::Matrix<cplx, 16, 1>>(col.data());
    }
  }
  return l;
}

Trajectory propagate_tlme(const TlmeModel& model, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                          double rtol, double atol) {
  if (rho0.dim() != 4) throw ContractViolation("propagate_tlme: expected a 4x4 state");
  OdeOptions oo;
  oo.rtol = rtol;
  oo.atol = atol;
  const OdeRhs rhs = [&](double t, const CVector& y, CVector& dy) {
    dy = vectorize(model.rhs(unvectorize(y, 4), t));
  };
  const auto ys = integrate_dopri5(rhs, vectorize(rho0.op()), t_grid, oo);
  Trajectory traj;
  traj.times = t_grid;
  traj.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ys.size(); ++k) {
    CMatrix r = hermitize(unvectorize(ys[k], 4));
    traj.max_trace_drift = std::max(traj.max_trace_drift, std::abs(r.trace() - cplx(1.0, 0.0)));
    const double me = hermitian_eigenvalues(r)(0);
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, me);
    if (me < -1e-4) traj.positivity_flag = true;
    traj.states.emplace_back(std::move(r), rho0.label());
  }
  return traj;
}

DynamicalMapTable tlme_dynamical_maps(const TlmeModel& model, const std::vector<double>& t_grid, double rtol,
                                      double atol) {
  OdeOptions oo;
  oo.rtol = rtol;
  oo.atol = atol;
  const OdeRhs rhs = [&](double t, const CVector& y, CVector& dy) {
    const Eigen::Matrix<cplx, 16, 16> l = model.superoperator(t);
    dy.resize(256);
    Eigen::Map<Eigen::Matrix<cplx, 16, 16>>(dy.data()) = l * Eigen::Map<const Eigen::Matrix<cplx, 16, 16>>(y.data());
  };
  CVector y0(256);
  Eigen::Map<Eigen::Matrix<cplx, 16, 16>>(y0.data()).setIdentity();
  const auto ys = integrate_dopri5(rhs, y0, t_grid, oo);
  // Inputs are label-basis states; rotate them into the eigenbasis first.
  const CMatrix w = model.spectrum().states.adjoint() * label_basis();
  CMatrix basis_change(16, 16);
  for (int q = 0; q < 4; ++q) {
    for (int p = 0; p < 4; ++p) {
      CMatrix e = CMatrix::Zero(4, 4);
      e(p, q) = 1.0;
      basis_change.col(p + 4 * q) = vectorize(w * e * w.adjoint());
    }
  }
  DynamicalMapTable table;
  table.dim = 4;
  table.times = t_grid;
  table.maps.reserve(ys.size());
  for (const auto& y : ys) {
    table.maps.emplace_back(Eigen::Map<const Eigen::Matrix<cplx, 16, 16>>(y.data()) * basis_change);
  }
  return table;
}

}  // namespace pnm
