#pragma once

#include <vector>

#include "pnm/quantum.hpp"

namespace pnm {

// Column-stacking vectorisation: vec(rho)[i + d*j] = rho(i, j).
CVector vectorize(const CMatrix& rho);
CMatrix unvectorize(const CVector& v, int dim);

// Reduced dynamical maps Phi_k acting on vec(rho_sys) at a list of times,
// rho_sys(t_k) = unvec(Phi_k vec(rho_sys(0))). Built once per model so that
// many initial-state pairs can be scored cheaply.
struct DynamicalMapTable {
  int dim = 0;
  std::vector<double> times;
  std::vector<CMatrix> maps;

  CMatrix apply(std::size_t k, const CMatrix& rho0) const;
};

}  // namespace pnm
