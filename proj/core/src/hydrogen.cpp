#include "fadforge/hydrogen.hpp"

#include <cmath>
#include <stdexcept>

namespace fadforge {

namespace {

const std::array<std::array<double, 4>, 4>& shape_values() {
  static const auto vals = [] {
    std::array<std::array<double, 4>, 4> v{};
    const auto& pts = QuadShape::gauss_points();
    double dN[4][2];
    for (int q = 0; q < 4; ++q) QuadShape::eval(pts[q][0], pts[q][1], v[q].data(), dN);
    return v;
  }();
  return vals;
}

struct TransportOperators {
  Eigen::SparseMatrix<double> M;    // consistent mass
  Eigen::SparseMatrix<double> K_D;  // diffusion
  Eigen::SparseMatrix<double> K_V;  // stress drift (row = test function)
};

TransportOperators assemble_transport(const Simulation& sim) {
  const Mesh& mesh = sim.mesh();
  const int nn = mesh.n_nodes();
  std::vector<Eigen::Triplet<double>> tm, td, tv;
  const auto& N = shape_values();
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const Quad& conn = mesh.elems[e];
    const HydrogenParams& h = sim.hydrogen_params(e);
    const double drift_coef = h.D * h.Vh / (h.R * h.T);
    for (int q = 0; q < 4; ++q) {
      const IsoMap& g = sim.geometry(e)[q];
      const double w = g.weight;
      double gsx = 0.0, gsy = 0.0;  // grad sigma_h
      for (int a = 0; a < 4; ++a) {
        gsx += g.dNdx[a][0] * sim.state().sigma_h[conn[a]];
        gsy += g.dNdx[a][1] * sim.state().sigma_h[conn[a]];
      }
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          tm.emplace_back(conn[a], conn[b], w * N[q][a] * N[q][b]);
          td.emplace_back(conn[a], conn[b],
                          w * h.D *
                              (g.dNdx[a][0] * g.dNdx[b][0] + g.dNdx[a][1] * g.dNdx[b][1]));
          tv.emplace_back(conn[a], conn[b],
                          w * drift_coef * N[q][b] * (gsx * g.dNdx[a][0] + gsy * g.dNdx[a][1]));
        }
    }
  }
  TransportOperators ops;
  ops.M.resize(nn, nn);
  ops.K_D.resize(nn, nn);
  ops.K_V.resize(nn, nn);
  ops.M.setFromTriplets(tm.begin(), tm.end());
  ops.K_D.setFromTriplets(td.begin(), td.end());
  ops.K_V.setFromTriplets(tv.begin(), tv.end());
  return ops;
}

struct DirichletData {
  std::vector<char> fixed;
  Eigen::VectorXd value;
  int count = 0;
};

DirichletData collect_bcs(const Simulation& sim) {
  DirichletData d;
  const int nn = sim.mesh().n_nodes();
  d.fixed.assign(nn, 0);
  d.value = Eigen::VectorXd::Zero(nn);
  for (const auto& bc : sim.concentration_bcs()) {
    const double v = bc.value(sim);
    if (v < 0.0) throw std::domain_error("concentration BC: prescribed C must be non-negative");
    for (int n : bc.nodes) {
      d.fixed[n] = 1;
      d.value[n] = v;
      ++d.count;
    }
  }
  return d;
}

// Row/column elimination preserving the right-hand side contributions.
void apply_dirichlet(Eigen::SparseMatrix<double>& A, Eigen::VectorXd& rhs,
                     const DirichletData& d) {
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it) {
      const int r = int(it.row()), c = int(it.col());
      if (d.fixed[r]) {
        it.valueRef() = (r == c) ? 1.0 : 0.0;
      } else if (d.fixed[c]) {
        rhs[r] -= it.value() * d.value[c];
        it.valueRef() = 0.0;
      }
    }
  for (int n = 0; n < rhs.size(); ++n)
    if (d.fixed[n]) rhs[n] = d.value[n];
  A.prune(0.0);
}

}  // namespace

void update_nodal_sigma_h(Simulation& sim) {
  const Mesh& mesh = sim.mesh();
  Eigen::VectorXd num = Eigen::VectorXd::Zero(mesh.n_nodes());
  Eigen::VectorXd den = Eigen::VectorXd::Zero(mesh.n_nodes());
  const auto& N = shape_values();
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const Quad& conn = mesh.elems[e];
    for (int q = 0; q < 4; ++q) {
      const double w = sim.geometry(e)[q].weight;
      const double sh = sim.state().qp[e][q].sigma.hydrostatic();
      for (int a = 0; a < 4; ++a) {
        num[conn[a]] += w * N[q][a] * sh;
        den[conn[a]] += w * N[q][a];
      }
    }
  }
  for (int n = 0; n < mesh.n_nodes(); ++n)
    sim.state().sigma_h[n] = den[n] > 0.0 ? num[n] / den[n] : 0.0;
}

void diffusion_step(Simulation& sim, double dt) {
  if (dt <= 0.0) throw std::domain_error("diffusion_step: dt must be positive");
  const auto ops = assemble_transport(sim);
  const auto bcs = collect_bcs(sim);
  const Eigen::VectorXd c_old = sim.state().conc;

  // Implicit diffusion, Picard on the drift term.
  Eigen::SparseMatrix<double> A = ops.M / dt + ops.K_D;
  Eigen::VectorXd base_rhs = ops.M * c_old / dt;
  Eigen::VectorXd c = c_old;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  bool factorized = false;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd rhs = base_rhs + ops.K_V * c;
    Eigen::SparseMatrix<double> Ait = A;
    apply_dirichlet(Ait, rhs, bcs);
    if (!factorized) {
      solver.compute(Ait);
      if (solver.info() != Eigen::Success)
        throw std::runtime_error("diffusion_step: factorization failed");
      factorized = true;
    }
    const Eigen::VectorXd c_new = solver.solve(rhs);
    const double rel = (c_new - c).norm() / std::max(c_new.norm(), 1e-30);
    c = c_new;
    if (rel < 1e-8) {
      sim.state().conc = c;
      return;
    }
    if (it >= 20 && rel > 1.0) break;  // diverging: split the step
  }
  diffusion_step(sim, 0.5 * dt);
  diffusion_step(sim, 0.5 * dt);
}

void stationary_concentration(Simulation& sim) {
  const auto ops = assemble_transport(sim);
  const auto bcs = collect_bcs(sim);
  if (bcs.count == 0)
    throw std::runtime_error(
        "stationary_concentration: no prescribed concentration anywhere (singular system)");
  Eigen::SparseMatrix<double> A = ops.K_D - ops.K_V;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sim.mesh().n_nodes());
  apply_dirichlet(A, rhs, bcs);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("stationary_concentration: factorization failed");
  sim.state().conc = solver.solve(rhs);
}

std::vector<double> toughness_field(const Simulation& sim) {
  const Mesh& mesh = sim.mesh();
  std::vector<double> out(size_t(mesh.n_elems()) * 4);
  for (int e = 0; e < mesh.n_elems(); ++e)
    for (int q = 0; q < 4; ++q)
      out[size_t(e) * 4 + q] =
          hydrogen_toughness_factor(sim.conc_at(e, q), sim.hydrogen_params(e)) *
          sim.material(e).Gc;
  return out;
}

}  // namespace fadforge
