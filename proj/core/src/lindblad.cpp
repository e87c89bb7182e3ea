#include "pnm/lindblad.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pnm/errors.hpp"
#include "pnm/ode.hpp"

namespace pnm {

CVector vectorize(const CMatrix& rho) {
  return Eigen::Map<const CVector>(rho.data(), rho.size());
}

CMatrix unvectorize(const CVector& v, int dim) {
  if (v.size() != static_cast<Eigen::Index>(dim) * dim) {
    throw ContractViolation("unvectorize: size mismatch");
  }
  return Eigen::Map<const CMatrix>(v.data(), dim, dim);
}

CMatrix DynamicalMapTable::apply(std::size_t k, const CMatrix& rho0) const {
  return unvectorize(maps.at(k) * vectorize(rho0), dim);
}

void LindbladModel::validate() const {
  if (h.rows() != h.cols() || h.rows() == 0) throw ContractViolation("LindbladModel: H not square");
  if (hermiticity_error(h) > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw ContractViolation("LindbladModel: H not Hermitian");
  }
  if (static_cast<Eigen::Index>(sys_dim) * fock_dim != h.rows()) {
    throw ContractViolation("LindbladModel: dims do not match H");
  }
  for (const auto& j : jumps) {
    if (j.rate < 0.0 || !std::isfinite(j.rate)) {
      throw ContractViolation("LindbladModel: negative or non-finite rate for jump " + j.name);
    }
    if (j.op.rows() != h.rows() || j.op.cols() != h.cols()) {
      throw ContractViolation("LindbladModel: jump " + j.name + " has wrong dimension");
    }
  }
}

LindbladModel build_lindblad(const SivParams& p, const PhononModeParams& m, double gamma_siv,
                             double n_delta, SivForm form) {
  if (gamma_siv < 0.0 || n_delta < 0.0) {
    throw ContractViolation("build_lindblad: negative rate parameter");
  }
  m.validate();
  LindbladModel model;
  model.h = build_full_hamiltonian(p, m, form);
  model.sys_dim = 4;
  model.fock_dim = m.n_max + 1;
  const FockSpace fock(m.n_max);
  const CMatrix c = tensor(identity(4), fock.annihilation());
  const CMatrix jm = tensor(siv_lowering_jump(), identity(fock.dim()));
  const double n_ph = m.temperature > 0.0 ? bose_occupation(m.omega_ph, m.temperature) : 0.0;
  const double gph = std::isfinite(m.Q) ? m.gamma_ph() : 0.0;
  auto add = [&](const CMatrix& op, double rate, const char* name) {
    if (rate > 0.0) model.jumps.push_back({op, rate, name});
  };
  add(c, gph * (n_ph + 1.0), "c");
  add(c.adjoint(), gph * n_ph, "c_dag");
  add(jm, gamma_siv * (n_delta + 1.0), "J_minus");
  add(jm.adjoint(), gamma_siv * n_delta, "J_plus");
  model.validate();
  return model;
}

namespace {

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

CMatrix embed(const CMatrix& sub, const std::vector<int>& idx, int dim) {
  CMatrix full = CMatrix::Zero(dim, dim);
  const int n = static_cast<int>(idx.size());
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) full(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]) = sub(a, b);
  }
  return full;
}

CMatrix extract(const CMatrix& full, const std::vector<int>& idx) {
  const int n = static_cast<int>(idx.size());
  CMatrix sub(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) sub(a, b) = full(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  return sub;
}

// Union of sectors on which the given diagonal weights are non-zero.
std::vector<int> occupied_indices(const LindbladModel& model, const RVector& weight) {
  std::vector<int> idx;
  for (const auto& sector : coupled_sectors(model)) {
    bool hit = false;
    for (int i : sector) hit = hit || weight(i) > 0.0;
    if (hit) idx.insert(idx.end(), sector.begin(), sector.end());
  }
  std::sort(idx.begin(), idx.end());
  return idx;
}

double min_positive_rate(const LindbladModel& model) {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& j : model.jumps) {
    if (j.rate > 0.0) r = std::min(r, j.rate);
  }
  return r;
}

}  // namespace

CMatrix liouvillian(const LindbladModel& model) {
  const int d = model.dim();
  if (d > 128) throw DimensionError("liouvillian: dimension above 128 is not supported densely");
  const CMatrix id = identity(d);
  const cplx mi(0.0, -1.0);
  CMatrix l = mi * (kron(id, model.h) - kron(model.h.transpose(), id));
  for (const auto& j : model.jumps) {
    if (j.rate == 0.0) continue;
    const CMatrix jdj = j.op.adjoint() * j.op;
    l += j.rate * (kron(j.op.conjugate(), j.op) - 0.5 * kron(id, jdj) - 0.5 * kron(jdj.transpose(), id));
  }
  return l;
}

CMatrix lindblad_rhs(const LindbladModel& model, const CMatrix& rho) {
  const cplx mi(0.0, -1.0);
  CMatrix out = mi * (model.h * rho - rho * model.h);
  for (const auto& j : model.jumps) {
    if (j.rate == 0.0) continue;
    const CMatrix jr = j.op * rho;
    const CMatrix jdj = j.op.adjoint() * j.op;
    out += j.rate * (jr * j.op.adjoint() - 0.5 * (jdj * rho + rho * jdj));
  }
  return out;
}

std::vector<std::vector<int>> coupled_sectors(const LindbladModel& model) {
  const int d = model.dim();
  UnionFind uf(d);
  auto scan = [&](const CMatrix& m) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        if (i != j && m(i, j) != cplx(0.0, 0.0)) uf.unite(i, j);
      }
    }
  };
  scan(model.h);
  for (const auto& j : model.jumps) {
    if (j.rate > 0.0) scan(j.op);
  }
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < d; ++i) groups[uf.find(i)].push_back(i);
  std::vector<std::vector<int>> out;
  for (auto& kv : groups) out.push_back(std::move(kv.second));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

LindbladModel restrict_model(const LindbladModel& model, const std::vector<int>& indices) {
  LindbladModel sub;
  sub.h = extract(model.h, indices);
  sub.sys_dim = static_cast<int>(indices.size());
  sub.fock_dim = 1;
  for (const auto& j : model.jumps) {
    CMatrix op = extract(j.op, indices);
    if (j.rate > 0.0 && op.cwiseAbs().maxCoeff() > 0.0) sub.jumps.push_back({std::move(op), j.rate, j.name});
  }
  return sub;
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t samples) {
  if (samples < 2 || !(t1 > t0)) throw ContractViolation("uniform_grid: need >= 2 samples and t1 > t0");
  std::vector<double> g(samples);
  const double dt = (t1 - t0) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) g[i] = t0 + dt * static_cast<double>(i);
  g.back() = t1;
  return g;
}

namespace {

// Caches exp(L dt) for the most recent step length.
class ExpPropagator {
 public:
  explicit ExpPropagator(CMatrix l) : l_(std::move(l)) {}
  const CMatrix& step(double dt) {
    if (!valid_ || std::abs(dt - dt_) > 1e-12 * std::abs(dt)) {
      p_ = (l_ * dt).exp();
      dt_ = dt;
      valid_ = true;
    }
    return p_;
  }

 private:
  CMatrix l_;
  CMatrix p_;
  double dt_ = 0.0;
  bool valid_ = false;
};

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw ContractViolation("propagate: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw ContractViolation("propagate: times must strictly increase");
  }
}

}  // namespace

Trajectory propagate(const LindbladModel& model, const DensityMatrix& rho0,
                     const std::vector<double>& t_grid, const PropagateOptions& opt) {
  model.validate();
  check_grid(t_grid);
  const int d = model.dim();
  if (rho0.dim() != d) throw ContractViolation("propagate: initial state dimension mismatch");

  std::vector<int> idx(static_cast<std::size_t>(d));
  std::iota(idx.begin(), idx.end(), 0);
  if (opt.restrict_to_sector) idx = occupied_indices(model, rho0.op().diagonal().real());
  const LindbladModel sub = restrict_model(model, idx);
  const int ds = sub.dim();
  CMatrix rho = extract(rho0.op(), idx);

  Trajectory traj;
  traj.times = t_grid;
  traj.states.reserve(t_grid.size());
  traj.min_eigenvalue = std::numeric_limits<double>::infinity();

  auto emit = [&](const CMatrix& r_sub, double t) {
    CMatrix full = embed(hermitize(r_sub), idx, d);
    const double drift = std::abs(full.trace() - cplx(1.0, 0.0));
    traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
    if (!std::isfinite(drift) || drift > 1e-6) {
      throw NumericalError("propagate: trace drift " + std::to_string(drift), t);
    }
    if (!opt.keep_full_states && model.fock_dim > 1) {
      full = partial_trace_phonon(full, model.sys_dim, model.fock_dim);
    }
    const double me = hermitian_eigenvalues(full)(0);
    traj.min_eigenvalue = std::min(traj.min_eigenvalue, me);
    if (me < -1e-4) traj.positivity_flag = true;
    traj.states.emplace_back(std::move(full), rho0.label());
  };

  if (opt.integrator == Integrator::kExponential) {
    ExpPropagator prop(liouvillian(sub));
    CVector v = vectorize(rho);
    emit(rho, t_grid.front());
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
      v = prop.step(t_grid[k] - t_grid[k - 1]) * v;
      emit(unvectorize(v, ds), t_grid[k]);
    }
  } else {
    OdeOptions oo;
    oo.rtol = opt.rtol;
    oo.atol = opt.atol;
    const OdeRhs rhs = [&](double, const CVector& y, CVector& dy) {
      dy = vectorize(lindblad_rhs(sub, unvectorize(y, ds)));
    };
    const auto ys = integrate_dopri5(rhs, vectorize(rho), t_grid, oo);
    for (std::size_t k = 0; k < ys.size(); ++k) emit(unvectorize(ys[k], ds), t_grid[k]);
  }
  return traj;
}

DensityMatrix steady_state(const LindbladModel& model) {
  model.validate();
  bool dissipative = false;
  for (const auto& j : model.jumps) dissipative = dissipative || j.rate > 0.0;
  if (!dissipative) throw ContractViolation("steady_state: model has no dissipator");
  const auto sectors = coupled_sectors(model);
  if (sectors.size() > 1) {
    throw AmbiguityError("steady_state: " + std::to_string(sectors.size()) + " decoupled sectors",
                         static_cast<int>(sectors.size()));
  }
  const int d = model.dim();
  const CMatrix l = liouvillian(model);
  const double lnorm = l.norm();
  CMatrix a = l / lnorm;
  a.row(0).setZero();
  for (int i = 0; i < d; ++i) a(0, i + d * i) = 1.0;
  CVector b = CVector::Zero(static_cast<Eigen::Index>(d) * d);
  b(0) = 1.0;
  Eigen::PartialPivLU<CMatrix> lu(a);
  if (lu.rcond() < 1e-13) {
    throw AmbiguityError("steady_state: Liouvillian kernel is degenerate", 2);
  }
  const CVector x = lu.solve(b);
  CMatrix rho = hermitize(unvectorize(x, d));
  rho /= rho.trace();
  const double resid = (l * vectorize(rho)).norm();
  if (!(resid <= 1e-10 * lnorm * std::max(1.0, rho.norm()))) {
    throw NumericalError("steady_state: residual " + std::to_string(resid / lnorm) + " too large");
  }
  return DensityMatrix(rho, "steady_state");
}

DensityMatrix steady_state_from(const LindbladModel& model, const DensityMatrix& rho0) {
  try {
    return steady_state(model);
  } catch (const AmbiguityError&) {
  }
  const std::vector<int> idx = occupied_indices(model, rho0.op().diagonal().real());
  const LindbladModel sub = restrict_model(model, idx);
  if (coupled_sectors(sub).size() == 1) {
    try {
      const DensityMatrix ss = steady_state(sub);
      return DensityMatrix(embed(ss.op(), idx, model.dim()), "steady_state");
    } catch (const AmbiguityError&) {
    }
  }
  // Long-time propagation, doubled until it stops moving.
  double t_end = 10.0 / min_positive_rate(model);
  PropagateOptions opt;
  opt.keep_full_states = true;
  CMatrix prev = propagate(model, rho0, {0.0, t_end}, opt).states.back().op();
  for (int it = 0; it < 12; ++it) {
    t_end *= 2.0;
    const CMatrix next = propagate(model, rho0, {0.0, t_end}, opt).states.back().op();
    if (trace_distance(hermitize(prev), hermitize(next)) < 1e-9) {
      return DensityMatrix(hermitize(next), "steady_state");
    }
    prev = next;
  }
  throw NumericalError("steady_state_from: long-time propagation did not settle", t_end);
}

DynamicalMapTable reduced_dynamical_maps(const LindbladModel& model, const CMatrix& phonon_state,
                                         const std::vector<double>& t_grid) {
  model.validate();
  check_grid(t_grid);
  const int ns = model.sys_dim;
  const int nf = model.fock_dim;
  if (phonon_state.rows() != nf || phonon_state.cols() != nf) {
    throw ContractViolation("reduced_dynamical_maps: phonon state dimension mismatch");
  }
  RVector weight = RVector::Zero(model.dim());
  for (int s = 0; s < ns; ++s) {
    for (int n = 0; n < nf; ++n) weight(s * nf + n) = std::abs(phonon_state(n, n));
  }
  const std::vector<int> idx = occupied_indices(model, weight);
  const LindbladModel sub = restrict_model(model, idx);
  const int ds = sub.dim();
  const int nsys2 = ns * ns;

  // Columns: vec of sub-space restriction of E_ij (x) phonon_state.
  CMatrix v(static_cast<Eigen::Index>(ds) * ds, nsys2);
  for (int j = 0; j < ns; ++j) {
    for (int i = 0; i < ns; ++i) {
      CMatrix e = CMatrix::Zero(ns, ns);
      e(i, j) = 1.0;
      v.col(i + ns * j) = vectorize(extract(tensor(e, phonon_state), idx));
    }
  }
  // Partial-trace contributions: sub-vec entry (a,b) -> reduced (s_a, s_b)
  // whenever the Fock indices coincide.
  struct Tr {
    Eigen::Index from;
    Eigen::Index to;
  };
  std::vector<Tr> trace_terms;
  for (int b = 0; b < ds; ++b) {
    for (int a = 0; a < ds; ++a) {
      const int fa = idx[static_cast<std::size_t>(a)], fb = idx[static_cast<std::size_t>(b)];
      if (fa % nf == fb % nf) {
        trace_terms.push_back({a + static_cast<Eigen::Index>(ds) * b, (fa / nf) + static_cast<Eigen::Index>(ns) * (fb / nf)});
      }
    }
  }
  auto reduce = [&](const CMatrix& vv) {
    CMatrix phi = CMatrix::Zero(nsys2, nsys2);
    for (const auto& t : trace_terms) phi.row(t.to) += vv.row(t.from);
    return phi;
  };

  DynamicalMapTable table;
  table.dim = ns;
  table.times = t_grid;
  table.maps.reserve(t_grid.size());
  ExpPropagator prop(liouvillian(sub));
  table.maps.push_back(reduce(v));
  for (std::size_t k = 1; k < t_grid.size(); ++k) {
    v = prop.step(t_grid[k] - t_grid[k - 1]) * v;
    table.maps.push_back(reduce(v));
  }
  return table;
}

}  // namespace pnm
