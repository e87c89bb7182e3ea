#pragma once

#include <functional>
#include <vector>

namespace pnm {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_panels = 20000;
};

// Adaptive 7/15-point Gauss-Kronrod over the panels defined by sorted
// breakpoints. The panel with the largest error estimate is bisected until
// the summed estimate meets max(abs_tol, rel_tol |I|).
QuadResult gauss_kronrod(const std::function<double(double)>& f, std::vector<double> breakpoints,
                         const QuadOptions& opt = {});

}  // namespace pnm
