#pragma once

#include <array>
#include <vector>

namespace pnm {

struct LinearFit {
  double slope = 0.0;
  double half_width = 0.0;  // 95 % confidence half width of the slope
  double r_squared = 0.0;   // 1 - SS_res / SS_tot with SS_tot about the mean
  double lower() const { return slope - half_width; }
  double upper() const { return slope + half_width; }
};

// Least squares y = a x, confidence from Student t on n - 1 degrees of freedom.
LinearFit fit_linear_through_origin(const std::vector<double>& xs, const std::vector<double>& ys);

struct TanhFit {
  double a = 0.0, b = 0.0, c = 0.0;
  std::array<double, 3> sigma{};  // standard errors of a, b, c
  double mse = 0.0;
  int iterations = 0;
  bool converged = false;
};

// y = a tanh(b / x) + c by damped Gauss-Newton (Levenberg-Marquardt).
// Starts from a = max y - min y, b = median x, c = min y.
TanhFit fit_tanh(const std::vector<double>& xs, const std::vector<double>& ys, int max_iter = 500);

}  // namespace pnm
