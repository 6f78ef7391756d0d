#include "fadforge/fracture_post.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
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

struct DomainContext {
  std::vector<int> layers;
  std::vector<char> forbidden_boundary;  // outer boundary nodes excluding crack faces
};

DomainContext build_context(const Mesh& mesh, int tip_node, int max_layer) {
  DomainContext ctx;
  ctx.layers = node_layers_from_tip(mesh, tip_node, max_layer);
  ctx.forbidden_boundary.assign(mesh.n_nodes(), 0);
  for (auto [a, b] : mesh.boundary_edges()) {
    ctx.forbidden_boundary[a] = 1;
    ctx.forbidden_boundary[b] = 1;
  }
  for (auto [a, b] : mesh.seams) {
    ctx.forbidden_boundary[a] = 0;
    ctx.forbidden_boundary[b] = 0;
  }
  ctx.forbidden_boundary[tip_node] = 0;
  return ctx;
}

// q value per node for a (L_in, L_out) pyramid.
double q_of_layer(int layer, int l_in, int l_out) {
  if (layer < 0) return 0.0;  // unreachable nodes
  if (layer <= l_in) return 1.0;
  if (layer >= l_out) return 0.0;
  return double(l_out - layer) / double(l_out - l_in);
}

struct LocalFrame {
  double c, s;  // crack direction cosine/sine
  double to_local_x(double gx, double gy) const { return c * gx + s * gy; }
  double to_local_y(double gx, double gy) const { return -s * gx + c * gy; }
};

// Generic domain integral: the integrand callback receives the quadrature
// point data and the local-frame q-gradient.
template <class Integrand>
double domain_integral(const Simulation& sim, const DomainContext& ctx, const LocalFrame& fr,
                       int l_in, int l_out, Integrand&& f) {
  const Mesh& mesh = sim.mesh();
  const auto& N = shape_values();
  double total = 0.0;
  for (int e = 0; e < mesh.n_elems(); ++e) {
    const Quad& conn = mesh.elems[e];
    double qn[4];
    bool active = false, all_one = true;
    for (int a = 0; a < 4; ++a) {
      qn[a] = q_of_layer(ctx.layers[conn[a]], l_in, l_out);
      if (qn[a] > 0.0) active = true;
      if (qn[a] < 1.0) all_one = false;
    }
    if (!active || all_one) continue;  // only the transition ring contributes
    for (int a : conn)
      if (ctx.forbidden_boundary[a])
        throw std::runtime_error("domain integral: integration domain touches the outer boundary");
    for (int q = 0; q < 4; ++q) {
      const IsoMap& g = sim.geometry(e)[q];
      double qx = 0.0, qy = 0.0;
      for (int a = 0; a < 4; ++a) {
        qx += g.dNdx[a][0] * qn[a];
        qy += g.dNdx[a][1] * qn[a];
      }
      const double q1 = fr.to_local_x(qx, qy);
      const double q2 = fr.to_local_y(qx, qy);
      total += g.weight * f(e, q, N[q], q1, q2);
    }
  }
  return total;
}

// Displacement gradient (global frame) at a quadrature point.
void displacement_gradient(const Simulation& sim, int e, int q, double grad[2][2]) {
  const Mesh& mesh = sim.mesh();
  const Quad& conn = mesh.elems[e];
  const IsoMap& g = sim.geometry(e)[q];
  grad[0][0] = grad[0][1] = grad[1][0] = grad[1][1] = 0.0;
  for (int a = 0; a < 4; ++a) {
    const auto [ux, uy] = sim.global_displacement(conn[a]);
    grad[0][0] += g.dNdx[a][0] * ux;
    grad[0][1] += g.dNdx[a][1] * ux;
    grad[1][0] += g.dNdx[a][0] * uy;
    grad[1][1] += g.dNdx[a][1] * uy;
  }
}

}  // namespace

std::vector<int> node_layers_from_tip(const Mesh& mesh, int tip_node, int max_layer) {
  std::vector<std::vector<int>> node_elems(mesh.n_nodes());
  for (int e = 0; e < mesh.n_elems(); ++e)
    for (int a : mesh.elems[e]) node_elems[a].push_back(e);
  std::vector<int> layers(mesh.n_nodes(), -1);
  layers[tip_node] = 0;
  std::vector<int> frontier{tip_node};
  for (int l = 1; l <= max_layer && !frontier.empty(); ++l) {
    std::vector<int> next;
    for (int n : frontier)
      for (int e : node_elems[n])
        for (int m : mesh.elems[e])
          if (layers[m] < 0) {
            layers[m] = l;
            next.push_back(m);
          }
    frontier = std::move(next);
  }
  return layers;
}

JIntegralResult j_integral(const Simulation& sim, const CrackTipInfo& tip,
                           const std::vector<std::pair<int, int>>& domains) {
  if (domains.size() < 1) throw std::domain_error("j_integral: need at least one domain");
  int max_layer = 0;
  for (auto [li, lo] : domains) max_layer = std::max(max_layer, lo);
  const auto ctx = build_context(sim.mesh(), tip.tip_node, max_layer + 1);
  const LocalFrame fr{tip.dir_x, tip.dir_y};

  JIntegralResult out;
  for (auto [l_in, l_out] : domains) {
    if (l_in < 1 || l_out <= l_in) throw std::domain_error("j_integral: malformed domain");
    const double J = domain_integral(
        sim, ctx, fr, l_in, l_out,
        [&](int e, int q, const std::array<double, 4>&, double q1, double q2) {
          const PointState& st = sim.state().qp[e][q];
          double du[2][2];
          displacement_gradient(sim, e, q, du);
          // Rotate stress and displacement gradient into the crack frame.
          const double c = fr.c, s = fr.s;
          const double sxx = st.sigma.xx, syy = st.sigma.yy, sxy = st.sigma.xy;
          const double l11 = c * c * sxx + 2 * c * s * sxy + s * s * syy;
          const double l22 = s * s * sxx - 2 * c * s * sxy + c * c * syy;
          const double l12 = (c * c - s * s) * sxy + c * s * (syy - sxx);
          // du_local = R^T du R
          const double a11 = c * (du[0][0] * c + du[0][1] * s) + s * (du[1][0] * c + du[1][1] * s);
          const double a21 = -s * (du[0][0] * c + du[0][1] * s) + c * (du[1][0] * c + du[1][1] * s);
          const double W = st.work_density;
          return (l11 * a11 + l12 * a21) * q1 + (l12 * a11 + l22 * a21) * q2 - W * q1;
        });
    out.per_domain.push_back(J);
  }
  double sum = 0.0, lo = out.per_domain[0], hi = out.per_domain[0];
  for (double j : out.per_domain) {
    sum += j;
    lo = std::min(lo, j);
    hi = std::max(hi, j);
  }
  out.J = sum / out.per_domain.size();
  out.spread = out.J != 0.0 ? (hi - lo) / std::abs(out.J) : 0.0;
  return out;
}

double k_from_j(double J, double E, double nu) {
  if (J < 0.0) throw std::domain_error("k_from_j: J must be non-negative");
  return std::sqrt(E / (1.0 - nu * nu) * J);
}

MixedModeResult mixed_mode_keq(double K_I, double K_II) {
  if (K_I < 0.0) throw std::domain_error("mixed_mode_keq: K_I must be non-negative");
  MixedModeResult out;
  if (std::abs(K_II) < 1e-14 * std::max(K_I, 1.0)) {
    out.theta_star = 0.0;
    out.k_eq = K_I;
    return out;
  }
  out.theta_star =
      2.0 * std::atan((K_I - std::sqrt(K_I * K_I + 8.0 * K_II * K_II)) / (4.0 * K_II));
  const double half = 0.5 * out.theta_star;
  out.k_eq = std::cos(half) *
             (K_I * std::cos(half) * std::cos(half) - 1.5 * K_II * std::sin(out.theta_star));
  return out;
}

namespace {

// Plane-strain Williams fields with unit SIF, in the crack-local frame.
struct AuxFields {
  double s11, s22, s12;     // stresses
  double du1d1, du2d1;      // displacement gradient components w.r.t. x1
};

AuxFields aux_mode(int mode, double r, double theta, double E, double nu) {
  const double G = E / (2.0 * (1.0 + nu));
  const double kappa = 3.0 - 4.0 * nu;
  const double st = std::sin(theta), ct = std::cos(theta);
  const double s2 = std::sin(0.5 * theta), c2 = std::cos(0.5 * theta);
  const double s32 = std::sin(1.5 * theta), c32 = std::cos(1.5 * theta);
  const double amp = 1.0 / std::sqrt(2.0 * std::numbers::pi * r);
  AuxFields f{};
  double u1, u2, f1p, f2p;  // u_i = sqrt(r/2pi)/(2G) f_i(theta)
  const double uamp = std::sqrt(r / (2.0 * std::numbers::pi)) / (2.0 * G);
  if (mode == 1) {
    f.s11 = amp * c2 * (1.0 - s2 * s32);
    f.s22 = amp * c2 * (1.0 + s2 * s32);
    f.s12 = amp * c2 * s2 * c32;
    const double f1 = c2 * (kappa - ct);
    const double f2 = s2 * (kappa - ct);
    f1p = -0.5 * s2 * (kappa - ct) + c2 * st;
    f2p = 0.5 * c2 * (kappa - ct) + s2 * st;
    u1 = uamp * f1;
    u2 = uamp * f2;
  } else {
    f.s11 = -amp * s2 * (2.0 + c2 * c32);
    f.s22 = amp * s2 * c2 * c32;
    f.s12 = amp * c2 * (1.0 - s2 * s32);
    const double f1 = s2 * (kappa + 2.0 + ct);
    const double f2 = -c2 * (kappa - 2.0 + ct);
    f1p = 0.5 * c2 * (kappa + 2.0 + ct) - s2 * st;
    f2p = 0.5 * s2 * (kappa - 2.0 + ct) + c2 * st;
    u1 = uamp * f1;
    u2 = uamp * f2;
  }
  // du/dx1 = du/dr cos(theta) - du/dtheta sin(theta)/r
  const double du1dr = 0.5 * u1 / r;
  const double du2dr = 0.5 * u2 / r;
  const double du1dt = uamp * f1p;
  const double du2dt = uamp * f2p;
  f.du1d1 = du1dr * ct - du1dt * st / r;
  f.du2d1 = du2dr * ct - du2dt * st / r;
  return f;
}

}  // namespace

InteractionResult interaction_integral_k(const Simulation& sim, const CrackTipInfo& tip,
                                         const std::vector<std::pair<int, int>>& domains) {
  if (domains.empty()) throw std::domain_error("interaction_integral_k: need domains");
  int max_layer = 0;
  for (auto [li, lo] : domains) max_layer = std::max(max_layer, lo);
  const auto ctx = build_context(sim.mesh(), tip.tip_node, max_layer + 1);
  const LocalFrame fr{tip.dir_x, tip.dir_y};
  // All elements share the elastic constants in the integration ring.
  const double E = sim.material(0).E;
  const double nu = sim.material(0).nu;
  const double Ep = E / (1.0 - nu * nu);

  InteractionResult out;
  for (auto [l_in, l_out] : domains) {
    double I[2] = {0.0, 0.0};
    for (int mode = 1; mode <= 2; ++mode) {
      I[mode - 1] = domain_integral(
          sim, ctx, fr, l_in, l_out,
          [&](int e, int q, const std::array<double, 4>&, double q1, double q2) {
            const PointState& st = sim.state().qp[e][q];
            const IsoMap& g = sim.geometry(e)[q];
            const double dx = g.x - tip.x, dy = g.y - tip.y;
            const double x1 = fr.to_local_x(dx, dy), x2 = fr.to_local_y(dx, dy);
            const double r = std::max(std::hypot(x1, x2), 1e-12);
            const double theta = std::atan2(x2, x1);
            const AuxFields aux = aux_mode(mode, r, theta, E, nu);

            const double c = fr.c, s = fr.s;
            const double sxx = st.sigma.xx, syy = st.sigma.yy, sxy = st.sigma.xy;
            const double l11 = c * c * sxx + 2 * c * s * sxy + s * s * syy;
            const double l22 = s * s * sxx - 2 * c * s * sxy + c * c * syy;
            const double l12 = (c * c - s * s) * sxy + c * s * (syy - sxx);
            double du[2][2];
            displacement_gradient(sim, e, q, du);
            const double a11 =
                c * (du[0][0] * c + du[0][1] * s) + s * (du[1][0] * c + du[1][1] * s);
            const double a21 =
                -s * (du[0][0] * c + du[0][1] * s) + c * (du[1][0] * c + du[1][1] * s);

            // Auxiliary strain from the auxiliary stress (plane strain).
            const double tr_aux = (1.0 + nu) * (aux.s11 + aux.s22);
            const double e11 = ((1.0 + nu) * aux.s11 - nu * tr_aux) / E;
            const double e22 = ((1.0 + nu) * aux.s22 - nu * tr_aux) / E;
            const double e12 = (1.0 + nu) * aux.s12 / E;
            const double wint = l11 * e11 + l22 * e22 + 2.0 * l12 * e12;

            const double t1 = (l11 * aux.du1d1 + l12 * aux.du2d1) +
                              (aux.s11 * a11 + aux.s12 * a21);
            const double t2 = (l12 * aux.du1d1 + l22 * aux.du2d1) +
                              (aux.s12 * a11 + aux.s22 * a21);
            return t1 * q1 + t2 * q2 - wint * q1;
          });
    }
    out.K_I_per_domain.push_back(0.5 * Ep * I[0]);
    out.K_II_per_domain.push_back(0.5 * Ep * I[1]);
  }
  double s1 = 0.0, s2 = 0.0;
  for (size_t i = 0; i < out.K_I_per_domain.size(); ++i) {
    s1 += out.K_I_per_domain[i];
    s2 += out.K_II_per_domain[i];
  }
  out.K_I = s1 / out.K_I_per_domain.size();
  out.K_II = s2 / out.K_II_per_domain.size();
  return out;
}

}  // namespace fadforge
