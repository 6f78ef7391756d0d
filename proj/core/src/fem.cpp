#include "fadforge/fem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "fadforge/hydrogen.hpp"

namespace fadforge {

namespace {

const std::array<std::array<double, 4>, 4>& gauss_shape_values() {
  static const auto vals = [] {
    std::array<std::array<double, 4>, 4> v{};
    const auto& pts = QuadShape::gauss_points();
    double dN[4][2];
    for (int q = 0; q < 4; ++q) QuadShape::eval(pts[q][0], pts[q][1], v[q].data(), dN);
    return v;
  }();
  return vals;
}

}  // namespace

double RunResult::peak_reaction() const {
  double peak = 0.0;
  for (const auto& r : records) peak = std::max(peak, r.reaction);
  return peak;
}

Simulation::Simulation(Mesh mesh, MaterialParams base, SolverConfig config)
    : mesh_(std::move(mesh)), config_(config) {
  base.validate();
  mesh_.validate();
  const int ne = mesh_.n_elems();
  const int nn = mesh_.n_nodes();
  mat_.assign(ne, base);
  hyd_.assign(ne, HydrogenParams{});
  frame_angle_.assign(nn, 0.0);
  has_frame_.assign(nn, 0);

  geom_.resize(ne);
  const auto& pts = QuadShape::gauss_points();
  for (int e = 0; e < ne; ++e)
    for (int q = 0; q < 4; ++q) geom_[e][q] = iso_map(mesh_, e, pts[q][0], pts[q][1]);

  state_.u = Eigen::VectorXd::Zero(2 * nn);
  state_.phi = Eigen::VectorXd::Zero(nn);
  state_.conc = Eigen::VectorXd::Zero(nn);
  state_.sigma_h = Eigen::VectorXd::Zero(nn);
  state_.f_int = Eigen::VectorXd::Zero(2 * nn);
  state_.qp.assign(ne, {});
  qp_committed_ = state_.qp;
  u_committed_ = state_.u;
  f_int_committed_ = state_.f_int;
}

void Simulation::set_hydrogen(const HydrogenParams& base) {
  base.validate();
  hyd_base_ = base;
  hyd_.assign(mesh_.n_elems(), base);
  has_hydrogen_params_ = true;
}

void Simulation::set_hydrogen_degradation(int elem, double f_min, double q1, double q2) {
  hyd_[elem].f_min = f_min;
  hyd_[elem].q1 = q1;
  hyd_[elem].q2 = q2;
}

void Simulation::set_node_frame(int node, double angle) {
  frame_angle_[node] = angle;
  has_frame_[node] = 1;
}

void Simulation::add_dirichlet(int node, int comp, double scale, bool driving) {
  dirichlet_.push_back({node, comp, scale, driving});
}

void Simulation::add_dirichlet(const std::vector<int>& nodes, int comp, double scale,
                               bool driving) {
  for (int n : nodes) dirichlet_.push_back({n, comp, scale, driving});
}

void Simulation::add_nodal_force(int node, int comp, double scale) {
  forces_.push_back({node, comp, scale});
}

void Simulation::add_edge_traction(const std::string& nset, double tx, double ty) {
  const auto& set = mesh_.nset(nset);
  std::vector<char> in_set(mesh_.n_nodes(), 0);
  for (int n : set) in_set[n] = 1;
  for (auto [a, b] : mesh_.boundary_edges()) {
    if (!in_set[a] || !in_set[b]) continue;
    const double len = std::hypot(mesh_.nodes[a].x - mesh_.nodes[b].x,
                                  mesh_.nodes[a].y - mesh_.nodes[b].y);
    for (int n : {a, b}) {
      double fx = 0.5 * len * tx, fy = 0.5 * len * ty;
      if (has_frame_[n]) {
        const double c = std::cos(frame_angle_[n]), s = std::sin(frame_angle_[n]);
        const double lx = c * fx + s * fy;  // R^T f
        const double ly = -s * fx + c * fy;
        fx = lx;
        fy = ly;
      }
      forces_.push_back({n, 0, fx});
      forces_.push_back({n, 1, fy});
    }
  }
}

void Simulation::add_normal_pressure(const std::string& nset, double scale) {
  const auto& set = mesh_.nset(nset);
  std::vector<char> in_set(mesh_.n_nodes(), 0);
  for (int n : set) in_set[n] = 1;
  // Owning element per boundary edge, for orienting the normal.
  std::map<std::pair<int, int>, int> owner;
  for (int e = 0; e < mesh_.n_elems(); ++e)
    for (int k = 0; k < 4; ++k) {
      const int a = mesh_.elems[e][k], b = mesh_.elems[e][(k + 1) % 4];
      owner[{std::min(a, b), std::max(a, b)}] = e;
    }
  for (auto [a, b] : mesh_.boundary_edges()) {
    if (!in_set[a] || !in_set[b]) continue;
    const double ex = mesh_.nodes[b].x - mesh_.nodes[a].x;
    const double ey = mesh_.nodes[b].y - mesh_.nodes[a].y;
    const double len = std::hypot(ex, ey);
    double nx = ey / len, ny = -ex / len;
    const int e = owner.at({std::min(a, b), std::max(a, b)});
    double cx = 0.0, cy = 0.0;
    for (int n : mesh_.elems[e]) {
      cx += mesh_.nodes[n].x;
      cy += mesh_.nodes[n].y;
    }
    cx = 0.25 * cx - 0.5 * (mesh_.nodes[a].x + mesh_.nodes[b].x);
    cy = 0.25 * cy - 0.5 * (mesh_.nodes[a].y + mesh_.nodes[b].y);
    if (nx * cx + ny * cy < 0.0) {
      nx = -nx;
      ny = -ny;
    }
    for (int n : {a, b}) {
      double fx = 0.5 * len * scale * nx, fy = 0.5 * len * scale * ny;
      if (has_frame_[n]) {
        const double c = std::cos(frame_angle_[n]), s = std::sin(frame_angle_[n]);
        const double lx = c * fx + s * fy;
        const double ly = -s * fx + c * fy;
        fx = lx;
        fy = ly;
      }
      forces_.push_back({n, 0, fx});
      forces_.push_back({n, 1, fy});
    }
  }
}

void Simulation::pin_phi(const std::vector<int>& nodes) {
  phi_pinned_.insert(phi_pinned_.end(), nodes.begin(), nodes.end());
  for (int n : nodes) state_.phi[n] = 1.0;
}

void Simulation::set_crack_tip(double x, double y) {
  tip_x_ = x;
  tip_y_ = y;
  has_tip_ = true;
}

void Simulation::set_initial_plastic_strain(int elem, double eps_p_eq) {
  if (eps_p_eq < 0.0) throw std::domain_error("set_initial_plastic_strain: negative value");
  for (int q = 0; q < 4; ++q) {
    qp_committed_[elem][q].eps_p_eq = eps_p_eq;
    qp_committed_[elem][q].psi_p = plastic_energy(eps_p_eq, mat_[elem]);
    state_.qp[elem][q] = qp_committed_[elem][q];
  }
}

void Simulation::freeze_initial_front() {
  initial_front_.clear();
  for (int n = 0; n < mesh_.n_nodes(); ++n)
    if (state_.phi[n] >= config_.phi_failure_threshold) initial_front_.push_back(n);
  front_frozen_ = true;
}

double Simulation::min_ell() const {
  double m = mat_.front().ell;
  for (const auto& p : mat_) m = std::min(m, p.ell);
  return m;
}

bool Simulation::preflight_mesh(const std::string& elset, double ell) const {
  return mesh_.min_edge_length(elset) <= ell / 4.0 + 1e-12;
}

double Simulation::phi_at(int elem, int q) const {
  const auto& N = gauss_shape_values()[q];
  double v = 0.0;
  for (int a = 0; a < 4; ++a) v += N[a] * state_.phi[mesh_.elems[elem][a]];
  return std::clamp(v, 0.0, 1.0);
}

double Simulation::conc_at(int elem, int q) const {
  const auto& N = gauss_shape_values()[q];
  double v = 0.0;
  for (int a = 0; a < 4; ++a) v += N[a] * state_.conc[mesh_.elems[elem][a]];
  return std::max(v, 0.0);
}

double Simulation::gc_hydrogen_at(int elem, int q) const {
  const double gc = mat_[elem].Gc;
  if (!config_.enable_hydrogen) return gc;
  return hydrogen_toughness_factor(conc_at(elem, q), hyd_[elem]) * gc;
}

std::pair<double, double> Simulation::global_displacement(int node) const {
  double ux = state_.u[2 * node], uy = state_.u[2 * node + 1];
  if (has_frame_[node]) {
    const double c = std::cos(frame_angle_[node]), s = std::sin(frame_angle_[node]);
    return {c * ux - s * uy, s * ux + c * uy};
  }
  return {ux, uy};
}

void Simulation::assemble_displacement(double lambda, Eigen::SparseMatrix<double>& K,
                                       Eigen::VectorXd& rhs, Eigen::VectorXd& f_int,
                                       const Eigen::VectorXd& delta_presc,
                                       const std::vector<char>& constrained) {
  const int ndof = 2 * mesh_.n_nodes();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(mesh_.n_elems()) * 64 + dirichlet_.size());
  rhs.setZero(ndof);
  f_int.setZero(ndof);

  double ue[8];
  double ke[8][8];
  double fe[8];
  for (int e = 0; e < mesh_.n_elems(); ++e) {
    const Quad& conn = mesh_.elems[e];
    // Gather global-frame displacements.
    for (int a = 0; a < 4; ++a) {
      const int n = conn[a];
      double ux = state_.u[2 * n], uy = state_.u[2 * n + 1];
      if (has_frame_[n]) {
        const double c = std::cos(frame_angle_[n]), s = std::sin(frame_angle_[n]);
        const double gx = c * ux - s * uy;
        const double gy = s * ux + c * uy;
        ux = gx;
        uy = gy;
      }
      ue[2 * a] = ux;
      ue[2 * a + 1] = uy;
    }
    std::fill(&ke[0][0], &ke[0][0] + 64, 0.0);
    std::fill(fe, fe + 8, 0.0);
    for (int q = 0; q < 4; ++q) {
      const IsoMap& g = geom_[e][q];
      double exx = 0, eyy = 0, gxy = 0;
      for (int a = 0; a < 4; ++a) {
        exx += g.dNdx[a][0] * ue[2 * a];
        eyy += g.dNdx[a][1] * ue[2 * a + 1];
        gxy += g.dNdx[a][1] * ue[2 * a] + g.dNdx[a][0] * ue[2 * a + 1];
      }
      PointState base = qp_committed_[e][q];
      base.phi = phi_at(e, q);
      base.C = conc_at(e, q);
      const auto res = stress_update({exx, eyy, 0.0, 0.5 * gxy}, base, mat_[e]);
      state_.qp[e][q] = res.state;
      const double w = g.weight;
      const double sxx = res.sigma.xx, syy = res.sigma.yy, sxy = res.sigma.xy;
      for (int a = 0; a < 4; ++a) {
        const double nx = g.dNdx[a][0], ny = g.dNdx[a][1];
        fe[2 * a] += w * (sxx * nx + sxy * ny);
        fe[2 * a + 1] += w * (sxy * nx + syy * ny);
      }
      const auto& D = res.tangent;
      for (int a = 0; a < 4; ++a) {
        const double nax = g.dNdx[a][0], nay = g.dNdx[a][1];
        for (int b = 0; b < 4; ++b) {
          const double nbx = g.dNdx[b][0], nby = g.dNdx[b][1];
          ke[2 * a][2 * b] += w * (nax * (D[0][0] * nbx + D[0][2] * nby) +
                                   nay * (D[2][0] * nbx + D[2][2] * nby));
          ke[2 * a][2 * b + 1] += w * (nax * (D[0][1] * nby + D[0][2] * nbx) +
                                       nay * (D[2][1] * nby + D[2][2] * nbx));
          ke[2 * a + 1][2 * b] += w * (nay * (D[1][0] * nbx + D[1][2] * nby) +
                                       nax * (D[2][0] * nbx + D[2][2] * nby));
          ke[2 * a + 1][2 * b + 1] += w * (nay * (D[1][1] * nby + D[1][2] * nbx) +
                                           nax * (D[2][1] * nby + D[2][2] * nbx));
        }
      }
    }
    // Rotate rows/cols of framed nodes into their local axes.
    for (int a = 0; a < 4; ++a) {
      const int n = conn[a];
      if (!has_frame_[n]) continue;
      const double c = std::cos(frame_angle_[n]), s = std::sin(frame_angle_[n]);
      // rows: [c s; -s c] applied from the left (R^T)
      for (int col = 0; col < 8; ++col) {
        const double r0 = ke[2 * a][col], r1 = ke[2 * a + 1][col];
        ke[2 * a][col] = c * r0 + s * r1;
        ke[2 * a + 1][col] = -s * r0 + c * r1;
      }
      const double f0 = fe[2 * a], f1 = fe[2 * a + 1];
      fe[2 * a] = c * f0 + s * f1;
      fe[2 * a + 1] = -s * f0 + c * f1;
    }
    for (int b = 0; b < 4; ++b) {
      const int n = conn[b];
      if (!has_frame_[n]) continue;
      const double c = std::cos(frame_angle_[n]), s = std::sin(frame_angle_[n]);
      for (int row = 0; row < 8; ++row) {
        const double c0 = ke[row][2 * b], c1 = ke[row][2 * b + 1];
        ke[row][2 * b] = c * c0 + s * c1;
        ke[row][2 * b + 1] = -s * c0 + c * c1;
      }
    }
    // Scatter.
    for (int a = 0; a < 4; ++a)
      for (int i = 0; i < 2; ++i) {
        const int row = 2 * conn[a] + i;
        f_int[row] += fe[2 * a + i];
        if (constrained[row]) continue;
        for (int b = 0; b < 4; ++b)
          for (int j = 0; j < 2; ++j) {
            const int col = 2 * conn[b] + j;
            const double k = ke[2 * a + i][2 * b + j];
            if (k == 0.0) continue;
            if (constrained[col])
              rhs[row] -= k * delta_presc[col];
            else
              trip.emplace_back(row, col, k);
          }
      }
  }
  for (int d = 0; d < ndof; ++d)
    if (constrained[d]) {
      trip.emplace_back(d, d, 1.0);
      rhs[d] = delta_presc[d];
    }
  // External nodal forces and the out-of-balance internal force.
  Eigen::VectorXd f_ext = Eigen::VectorXd::Zero(ndof);
  for (const auto& nf : forces_) f_ext[2 * nf.node + nf.comp] += nf.scale * lambda;
  for (int d = 0; d < ndof; ++d)
    if (!constrained[d]) rhs[d] += f_ext[d] - f_int[d];

  K.resize(ndof, ndof);
  K.setFromTriplets(trip.begin(), trip.end());
}

SolveReport Simulation::solve_displacement(double lambda) {
  SolveReport rep;
  const int ndof = 2 * mesh_.n_nodes();
  std::vector<char> constrained(ndof, 0);
  Eigen::VectorXd target = Eigen::VectorXd::Zero(ndof);
  for (const auto& bc : dirichlet_) {
    const int d = 2 * bc.node + bc.comp;
    constrained[d] = 1;
    target[d] = bc.scale * lambda;
  }

  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd rhs, f_int;
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(ndof);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;

  double f_ext_norm = 0.0;
  {
    Eigen::VectorXd f_ext = Eigen::VectorXd::Zero(ndof);
    for (const auto& nf : forces_) f_ext[2 * nf.node + nf.comp] += nf.scale * lambda;
    f_ext_norm = f_ext.norm();
  }

  for (int it = 0; it < config_.max_newton; ++it) {
    for (int d = 0; d < ndof; ++d)
      if (constrained[d]) delta[d] = target[d] - state_.u[d];
    assemble_displacement(lambda, K, rhs, f_int, delta, constrained);

    double res = 0.0, react = 0.0, dmax = 0.0;
    for (int d = 0; d < ndof; ++d) {
      if (constrained[d]) {
        react += f_int[d] * f_int[d];
        dmax = std::max(dmax, std::abs(delta[d]));
      } else {
        res += rhs[d] * rhs[d];
      }
    }
    res = std::sqrt(res);
    react = std::sqrt(react);
    rep.residuals.push_back(res);
    if (!std::isfinite(res)) return rep;
    const double ref = std::max({f_ext_norm, react, 1e-6});
    if (res <= config_.newton_tol * ref && dmax < 1e-12) {
      rep.converged = true;
      rep.iterations = it;
      state_.f_int = f_int;
      state_.lambda = lambda;
      state_.reaction = driving_reaction();
      return rep;
    }

    solver.compute(K);
    if (solver.info() != Eigen::Success) return rep;
    const Eigen::VectorXd du = solver.solve(rhs);
    if (solver.info() != Eigen::Success) return rep;
    state_.u += du;
    rep.iterations = it + 1;
  }
  return rep;  // not converged
}

double Simulation::driving_reaction() const {
  double r = 0.0;
  for (const auto& bc : dirichlet_)
    if (bc.driving) r += state_.f_int[2 * bc.node + bc.comp];
  return r;
}

void Simulation::update_history() {
  for (int e = 0; e < mesh_.n_elems(); ++e)
    for (int q = 0; q < 4; ++q) {
      PointState& st = state_.qp[e][q];
      const SymTensor2 eps_e = st.eps + st.eps0 - st.eps_p;
      st.H = std::max(st.H, elastic_driving_energy(eps_e, mat_[e]));
    }
}

void Simulation::solve_phase_field() {
  const int nn = mesh_.n_nodes();
  std::vector<char> pinned(nn, 0);
  for (int n : phi_pinned_) pinned[n] = 1;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(size_t(mesh_.n_elems()) * 16 + phi_pinned_.size());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nn);
  const auto& shapeN = gauss_shape_values();

  for (int e = 0; e < mesh_.n_elems(); ++e) {
    const Quad& conn = mesh_.elems[e];
    const double ell = mat_[e].ell;
    for (int q = 0; q < 4; ++q) {
      const IsoMap& g = geom_[e][q];
      const PointState& st = state_.qp[e][q];
      const double drive = st.H + mat_[e].beta * st.psi_p;
      const double gch = gc_hydrogen_at(e, q);
      const double w = g.weight;
      const double mass = gch / ell + 2.0 * drive;
      for (int a = 0; a < 4; ++a) {
        const int ra = conn[a];
        if (!pinned[ra]) rhs[ra] += w * 2.0 * drive * shapeN[q][a];
        for (int b = 0; b < 4; ++b) {
          const double k = w * (mass * shapeN[q][a] * shapeN[q][b] +
                                gch * ell *
                                    (g.dNdx[a][0] * g.dNdx[b][0] + g.dNdx[a][1] * g.dNdx[b][1]));
          if (pinned[ra]) continue;
          const int cb = conn[b];
          if (pinned[cb])
            rhs[ra] -= k * 1.0;
          else
            trip.emplace_back(ra, cb, k);
        }
      }
    }
  }
  for (int n = 0; n < nn; ++n)
    if (pinned[n]) {
      trip.emplace_back(n, n, 1.0);
      rhs[n] = 1.0;
    }
  Eigen::SparseMatrix<double> A(nn, nn);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
  solver.compute(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("solve_phase_field: factorization failed (indefinite system)");
  state_.phi = solver.solve(rhs);
  const double lo = state_.phi.minCoeff();
  const double hi = state_.phi.maxCoeff();
  if (lo < -1e-6 || hi > 1.0 + 1e-6)
    throw std::runtime_error("solve_phase_field: phi left [0,1]: min " + std::to_string(lo) +
                             " max " + std::to_string(hi));
}

StaggerReport Simulation::staggered_step(double lambda) {
  StaggerReport rep;
  const Eigen::VectorXd phi_saved = state_.phi;
  const Eigen::VectorXd conc_saved = state_.conc;
  const Eigen::VectorXd sigma_h_saved = state_.sigma_h;

  for (int pass = 0; pass < config_.max_stagger; ++pass) {
    rep.passes = pass + 1;
    rep.last_newton = solve_displacement(lambda);
    if (!rep.last_newton.converged) break;
    update_history();
    if (config_.enable_hydrogen && has_hydrogen_params_) {
      update_nodal_sigma_h(*this);
      if (config_.hydrogen_stationary)
        stationary_concentration(*this);
      else
        diffusion_step(*this, config_.dt);
    }
    double dphi = 0.0;
    if (config_.enable_phase_field) {
      const Eigen::VectorXd phi_old = state_.phi;
      solve_phase_field();
      dphi = (state_.phi - phi_old).lpNorm<Eigen::Infinity>();
    }
    rep.last_dphi = dphi;
    if (dphi < config_.stagger_tol) {
      rep.converged = true;
      commit();
      return rep;
    }
  }
  // Restore the last committed state.
  state_.u = u_committed_;
  state_.qp = qp_committed_;
  state_.f_int = f_int_committed_;
  state_.phi = phi_saved;
  state_.conc = conc_saved;
  state_.sigma_h = sigma_h_saved;
  return rep;
}

void Simulation::commit() {
  const int ndof = 2 * mesh_.n_nodes();
  std::vector<char> constrained(ndof, 0);
  for (const auto& bc : dirichlet_) constrained[2 * bc.node + bc.comp] = 1;
  double dw = 0.0;
  for (int d = 0; d < ndof; ++d)
    if (constrained[d])
      dw += 0.5 * (f_int_committed_[d] + state_.f_int[d]) * (state_.u[d] - u_committed_[d]);
  for (const auto& nf : forces_) {
    const int d = 2 * nf.node + nf.comp;
    dw += 0.5 * nf.scale * (lambda_committed_ + state_.lambda) * (state_.u[d] - u_committed_[d]);
  }
  work_external_ += dw;
  lambda_committed_ = state_.lambda;
  u_committed_ = state_.u;
  f_int_committed_ = state_.f_int;
  qp_committed_ = state_.qp;
}

double Simulation::front_advance() const {
  const double thr = config_.phi_failure_threshold;
  double adv = 0.0;
  for (int n = 0; n < mesh_.n_nodes(); ++n) {
    if (state_.phi[n] < thr) continue;
    const double x = mesh_.nodes[n].x, y = mesh_.nodes[n].y;
    double d;
    if (!initial_front_.empty()) {
      d = std::numeric_limits<double>::max();
      for (int m : initial_front_)
        d = std::min(d, std::hypot(x - mesh_.nodes[m].x, y - mesh_.nodes[m].y));
    } else if (has_tip_) {
      d = std::hypot(x - tip_x_, y - tip_y_);
    } else {
      continue;
    }
    adv = std::max(adv, d);
  }
  return adv;
}

StepRecord Simulation::make_record(int stagger_passes) {
  StepRecord rec;
  rec.lambda = state_.lambda;
  rec.reaction = state_.reaction;
  rec.probe = probe_ ? probe_(*this) : state_.reaction;
  rec.stagger_passes = stagger_passes;
  rec.front_advance = front_advance();
  rec.max_phi = state_.phi.size() ? state_.phi.maxCoeff() : 0.0;
  rec.work_external = work_external_;

  const auto& shapeN = gauss_shape_values();
  double e_el = 0.0, e_p = 0.0, e_f = 0.0;
  for (int e = 0; e < mesh_.n_elems(); ++e) {
    const Quad& conn = mesh_.elems[e];
    const MaterialParams& m = mat_[e];
    for (int q = 0; q < 4; ++q) {
      const IsoMap& g = geom_[e][q];
      const PointState& st = state_.qp[e][q];
      const double w = g.weight;
      const SymTensor2 eps_e = st.eps + st.eps0 - st.eps_p;
      const double vol = eps_e.trace();
      const double gphi = degradation_g(std::clamp(st.phi, 0.0, 1.0));
      const double psi_plus = elastic_driving_energy(eps_e, m);
      const double neg = macaulay(-vol);
      e_el += w * (gphi * psi_plus + 0.5 * m.bulk() * neg * neg);
      e_p += w * st.plastic_dissipation;
      double phi_q = 0.0, gx = 0.0, gy = 0.0;
      for (int a = 0; a < 4; ++a) {
        phi_q += shapeN[q][a] * state_.phi[conn[a]];
        gx += g.dNdx[a][0] * state_.phi[conn[a]];
        gy += g.dNdx[a][1] * state_.phi[conn[a]];
      }
      const double gch = gc_hydrogen_at(e, q);
      e_f += w * gch / (2.0 * m.ell) * (phi_q * phi_q + m.ell * m.ell * (gx * gx + gy * gy));
    }
  }
  rec.energy_elastic = e_el;
  rec.energy_plastic = e_p;
  rec.energy_fracture = e_f;
  return rec;
}

RunResult Simulation::run() {
  RunResult out;
  if (!front_frozen_) freeze_initial_front();
  out.records.push_back(make_record(0));

  const double dl0 = 1.0 / config_.n_steps;
  double dl = dl0;
  double lambda = state_.lambda;
  int clean = 0;
  const double ell = min_ell();
  const double front_limit = config_.front_advance_scale * ell;
  double peak = 0.0;
  int peak_idx = 0;

  while (lambda < 1.0 - 1e-12) {
    dl = std::min(dl, 1.0 - lambda);
    const auto rep = staggered_step(lambda + dl);
    if (!rep.converged) {
      dl *= 0.5;
      clean = 0;
      if (dl < config_.min_step_frac) {
        out.aborted = true;
        out.abort_reason = "load step fell below the minimum increment";
        return out;
      }
      continue;
    }
    lambda += dl;
    ++clean;
    if (clean >= 3) {
      dl = std::min(dl * config_.step_growth, config_.max_step_factor * dl0);
      clean = 0;
    }
    out.records.push_back(make_record(rep.passes));
    const auto& rec = out.records.back();
    const auto& prev = out.records[out.records.size() - 2];

    if (rec.reaction > peak) {
      peak = rec.reaction;
      peak_idx = int(out.records.size()) - 1;
    }

    if (config_.enable_phase_field && rec.front_advance >= front_limit &&
        prev.front_advance < front_limit) {
      const double t = (front_limit - prev.front_advance) /
                       std::max(rec.front_advance - prev.front_advance, 1e-30);
      out.failure.failed = true;
      out.failure.step = int(out.records.size()) - 1;
      out.failure.lambda = prev.lambda + t * (rec.lambda - prev.lambda);
      out.failure.load = prev.reaction + t * (rec.reaction - prev.reaction);
      out.failure.probe = prev.probe + t * (rec.probe - prev.probe);
      out.failure.criterion = "front";
      return out;
    }
    if (out.records.size() > 2 && peak > 0.0 &&
        rec.reaction < (1.0 - config_.reaction_drop) * peak) {
      out.failure.failed = true;
      out.failure.step = int(out.records.size()) - 1;
      out.failure.lambda = out.records[peak_idx].lambda;
      out.failure.load = peak;
      out.failure.probe = out.records[peak_idx].probe;
      out.failure.criterion = "reaction-drop";
      return out;
    }
  }
  return out;
}

LimitLoadResult Simulation::run_limit_load() {
  const bool pf = config_.enable_phase_field;
  config_.enable_phase_field = false;
  for (auto& m : mat_) m.n = 0.0;  // perfectly plastic branch

  LimitLoadResult out;
  // Elastic probe for the reference stiffness.
  const double probe = std::min(1e-3, 0.2 / config_.n_steps);
  auto rep = staggered_step(probe);
  if (!rep.converged) throw std::runtime_error("run_limit_load: elastic probe failed");
  const double k_el = state_.reaction / probe;
  out.records.push_back(make_record(rep.passes));

  double lambda = probe;
  double dl = 1.0 / config_.n_steps;
  double prev_lambda = lambda, prev_reaction = state_.reaction;
  while (lambda < 1.0 - 1e-12) {
    dl = std::min(dl, 1.0 - lambda);
    rep = staggered_step(lambda + dl);
    if (!rep.converged) {
      dl *= 0.5;
      if (dl < config_.min_step_frac)
        throw std::runtime_error("run_limit_load: step size collapsed before the plateau");
      continue;
    }
    lambda += dl;
    out.records.push_back(make_record(rep.passes));
    const double k = (state_.reaction - prev_reaction) / (lambda - prev_lambda);
    prev_lambda = lambda;
    prev_reaction = state_.reaction;
    if (k < 0.01 * k_el) {
      out.Py = state_.reaction;
      out.lambda = lambda;
      out.stiffness_ratio = k / k_el;
      config_.enable_phase_field = pf;
      return out;
    }
  }
  config_.enable_phase_field = pf;
  throw std::runtime_error("run_limit_load: no plateau within the displacement budget");
}

double Simulation::initialize_residual_stress(const std::vector<SymTensor2>& sigma0_per_elem) {
  if (int(sigma0_per_elem.size()) != mesh_.n_elems())
    throw std::domain_error("initialize_residual_stress: field size mismatch");
  double norm0 = 0.0;
  for (int e = 0; e < mesh_.n_elems(); ++e) {
    const MaterialParams& m = mat_[e];
    const SymTensor2& s = sigma0_per_elem[e];
    const double tr = s.trace();
    SymTensor2 eps0;
    eps0.xx = ((1.0 + m.nu) * s.xx - m.nu * tr) / m.E;
    eps0.yy = ((1.0 + m.nu) * s.yy - m.nu * tr) / m.E;
    eps0.zz = ((1.0 + m.nu) * s.zz - m.nu * tr) / m.E;
    eps0.xy = (1.0 + m.nu) * s.xy / m.E;
    for (int q = 0; q < 4; ++q) {
      qp_committed_[e][q].eps0 = eps0;
      state_.qp[e][q].eps0 = eps0;
      norm0 += geom_[e][q].weight * s.norm_sq();
    }
  }
  // One equilibrium solve re-balances the imported field.
  const auto rep = solve_displacement(state_.lambda);
  if (!rep.converged)
    throw std::runtime_error("initialize_residual_stress: re-equilibration solve failed");
  update_history();
  double dnorm = 0.0;
  for (int e = 0; e < mesh_.n_elems(); ++e)
    for (int q = 0; q < 4; ++q) {
      SymTensor2 d = state_.qp[e][q].sigma - sigma0_per_elem[e];
      dnorm += geom_[e][q].weight * d.norm_sq();
    }
  commit();
  if (norm0 <= 0.0) return 0.0;
  return std::sqrt(dnorm / norm0);
}

}  // namespace fadforge
