#include "pnm/fitting.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <sstream>

#include "pnm/errors.hpp"

namespace pnm {

LinearFit fit_linear_through_origin(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw DimensionError("fit_linear_through_origin: size mismatch");
  if (xs.size() < 3) throw FitError("fit_linear_through_origin: need at least 3 points");
  double sxx = 0.0, sxy = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    mean += ys[i];
  }
  if (sxx == 0.0) throw FitError("fit_linear_through_origin: all abscissae are zero");
  mean /= static_cast<double>(ys.size());
  LinearFit f;
  f.slope = sxy / sxx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - f.slope * xs[i];
    ss_res += r * r;
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  const auto dof = static_cast<double>(xs.size() - 1);
  const boost::math::students_t dist(dof);
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  f.half_width = tq * std::sqrt(ss_res / dof / sxx);
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return f;
}

namespace {

double sum_sq(const Eigen::VectorXd& r) { return r.squaredNorm(); }

}  // namespace

TanhFit fit_tanh(const std::vector<double>& xs, const std::vector<double>& ys, int max_iter) {
  if (xs.size() != ys.size()) throw DimensionError("fit_tanh: size mismatch");
  if (xs.size() < 4) throw FitError("fit_tanh: need at least 4 points");
  for (double x : xs) {
    if (!(x > 0.0)) throw DomainError("fit_tanh: abscissae must be positive");
  }
  const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  if (*mx - *mn <= 1e-14 * std::max(1.0, std::abs(*mx))) {
    throw FitError("fit_tanh: constant data, b is unidentifiable");
  }
  const std::size_t n = xs.size();
  std::vector<double> sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  const double median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  Eigen::Vector3d p(*mx - *mn, median, *mn);
  auto residuals = [&](const Eigen::Vector3d& q) {
    Eigen::VectorXd r(n);
    for (std::size_t i = 0; i < n; ++i) r(i) = q(0) * std::tanh(q(1) / xs[i]) + q(2) - ys[i];
    return r;
  };
  auto jacobian = [&](const Eigen::Vector3d& q) {
    Eigen::MatrixXd j(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
      const double th = std::tanh(q(1) / xs[i]);
      j(i, 0) = th;
      j(i, 1) = q(0) * (1.0 - th * th) / xs[i];
      j(i, 2) = 1.0;
    }
    return j;
  };

  TanhFit f;
  double lambda = 1e-3;
  Eigen::VectorXd r = residuals(p);
  double cost = sum_sq(r);
  for (int it = 0; it < max_iter; ++it) {
    f.iterations = it + 1;
    const Eigen::MatrixXd j = jacobian(p);
    const Eigen::Matrix3d jtj = j.transpose() * j;
    const Eigen::Vector3d g = j.transpose() * r;
    bool improved = false;
    Eigen::Vector3d step;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::Matrix3d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      step = a.ldlt().solve(-g);
      const Eigen::Vector3d trial = p + step;
      const Eigen::VectorXd rt = residuals(trial);
      const double ct = sum_sq(rt);
      if (std::isfinite(ct) && ct <= cost) {
        p = trial;
        r = rt;
        const double rel = (cost - ct) / std::max(cost, 1e-300);
        cost = ct;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
        if (rel < 1e-14 || step.norm() < 1e-12 * (1.0 + p.norm())) f.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) {
      f.converged = g.norm() < 1e-8 * (1.0 + cost) || cost < 1e-28;
      break;
    }
    if (f.converged) break;
  }

  const Eigen::MatrixXd j = jacobian(p);
  const Eigen::Matrix3d jtj = j.transpose() * j;
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(jtj);
  const double cond = svd.singularValues()(0) / std::max(svd.singularValues()(2), 1e-300);
  if (!std::isfinite(cond) || cond > 1e14) {
    std::ostringstream os;
    os << "fit_tanh: singular Jacobian (condition number " << cond << ")";
    throw FitError(os.str());
  }
  f.a = p(0);
  f.b = p(1);
  f.c = p(2);
  f.mse = cost / static_cast<double>(n);
  const double s2 = n > 3 ? cost / static_cast<double>(n - 3) : 0.0;
  const Eigen::Matrix3d cov = s2 * jtj.inverse();
  for (int k = 0; k < 3; ++k) f.sigma[static_cast<std::size_t>(k)] = std::sqrt(std::max(cov(k, k), 0.0));
  return f;
}

}  // namespace pnm
