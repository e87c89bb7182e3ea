#include "pnm/ode.hpp"

#include <algorithm>
#include <cmath>

#include "pnm/errors.hpp"

namespace pnm {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double error_norm(const CVector& err, const CVector& y0, const CVector& y1, const OdeOptions& o) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double r = std::abs(err(i)) / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(1, err.size())));
}

bool finite(const CVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
  }
  return true;
}

}  // namespace

void integrate_dopri5_observe(const OdeRhs& rhs, const CVector& y0, const std::vector<double>& t_out,
                              const OdeObserver& observe, const OdeOptions& opt, OdeStats* stats) {
  if (t_out.empty()) return;
  for (std::size_t i = 1; i < t_out.size(); ++i) {
    if (!(t_out[i] > t_out[i - 1])) throw ContractViolation("integrate_dopri5: times must increase");
  }
  observe(0, y0);
  if (t_out.size() == 1) return;

  OdeStats st;
  const Eigen::Index n = y0.size();
  CVector y = y0, ynew(n), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), err(n);
  double t = t_out.front();
  const double t_end = t_out.back();
  rhs(t, y, k1);
  ++st.rhs_calls;

  double h = opt.initial_step;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic.
    double d0 = 0.0, dd1 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y(i));
      d0 += std::norm(y(i)) / (sc * sc);
      dd1 += std::norm(k1(i)) / (sc * sc);
    }
    d0 = std::sqrt(d0 / n);
    dd1 = std::sqrt(dd1 / n);
    double h0 = (d0 < 1e-5 || dd1 < 1e-5) ? 1e-6 : 0.01 * d0 / dd1;
    h0 = std::min(h0, t_end - t);
    tmp = y + h0 * k1;
    rhs(t + h0, tmp, k2);
    ++st.rhs_calls;
    double d2 = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y(i));
      d2 += std::norm(k2(i) - k1(i)) / (sc * sc);
    }
    d2 = std::sqrt(d2 / n) / h0;
    const double dm = std::max(dd1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min(100.0 * h0, h1);
  }
  if (opt.max_step > 0.0) h = std::min(h, opt.max_step);

  std::size_t next = 1;
  const double span = t_end - t;
  while (next < t_out.size()) {
    if (st.accepted + st.rejected >= opt.max_steps) {
      throw NumericalError("integrate_dopri5: step budget exhausted", t);
    }
    if (h < 1e-14 * std::max(std::abs(t), span)) {
      throw NumericalError("integrate_dopri5: step size underflow", t);
    }
    const bool last = h >= t_end - t;
    if (last) h = t_end - t;
    tmp = y + h * a21 * k1;
    rhs(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(t + h, ynew, k7);
    st.rhs_calls += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, ynew, opt);
    if (!std::isfinite(en) || !finite(ynew)) {
      ++st.rejected;
      h *= 0.2;
      continue;
    }
    if (en <= 1.0) {
      const double t_new = last ? t_end : t + h;
      // Dense output for every requested time inside (t, t_new].
      if (next < t_out.size() && t_out[next] <= t_new) {
        const CVector ydiff = ynew - y;
        const CVector bspl = h * k1 - ydiff;
        const CVector r4 = ydiff - h * k7 - bspl;
        const CVector r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        while (next < t_out.size() && t_out[next] <= t_new) {
          if (t_out[next] == t_new) {
            observe(next, ynew);
          } else {
            const double th = (t_out[next] - t) / h;
            const double th1 = 1.0 - th;
            tmp = y + th * (ydiff + th1 * (bspl + th * (r4 + th1 * r5)));
            observe(next, tmp);
          }
          ++next;
        }
      }
      y = ynew;
      k1 = k7;
      t = t_new;
      ++st.accepted;
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h *= fac;
      if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
    } else {
      ++st.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
    }
  }
  if (stats != nullptr) *stats = st;
}

std::vector<CVector> integrate_dopri5(const OdeRhs& rhs, const CVector& y0,
                                      const std::vector<double>& t_out, const OdeOptions& opt,
                                      OdeStats* stats) {
  std::vector<CVector> out;
  out.reserve(t_out.size());
  integrate_dopri5_observe(
      rhs, y0, t_out, [&](std::size_t, const CVector& y) { out.push_back(y); }, opt, stats);
  return out;
}

}  // namespace pnm
