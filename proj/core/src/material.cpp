#include "fadforge/material.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fadforge {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

}  // namespace

void MaterialParams::validate() const {
  require(E > 0.0, "MaterialParams: E must be positive");
  require(nu >= 0.0 && nu < 0.5, "MaterialParams: nu must be in [0, 0.5)");
  require(sigma_y0 > 0.0, "MaterialParams: sigma_y0 must be positive");
  require(n >= 0.0 && n < 1.0, "MaterialParams: n must be in [0, 1)");
  require(Gc > 0.0, "MaterialParams: Gc must be positive");
  require(ell > 0.0, "MaterialParams: ell must be positive");
  require(beta >= 0.0 && beta <= 1.0, "MaterialParams: beta must be in [0, 1]");
}

void HydrogenParams::validate() const {
  require(D > 0.0, "HydrogenParams: D must be positive");
  require(Vh > 0.0, "HydrogenParams: Vh must be positive");
  require(S > 0.0, "HydrogenParams: S must be positive");
  require(f_min > 0.0 && f_min <= 1.0, "HydrogenParams: f_min must be in (0, 1]");
  require(q1 >= 0.0, "HydrogenParams: q1 must be non-negative");
  require(q2 > 0.0, "HydrogenParams: q2 must be positive");
  require(T > 0.0, "HydrogenParams: T must be positive");
  require(R > 0.0, "HydrogenParams: R must be positive");
}

double degradation_g(double phi) {
  require(phi >= 0.0 && phi <= 1.0, "degradation_g: phi out of [0, 1]");
  const double q = 1.0 - phi;
  return q * q;
}

double degradation_g_deriv(double phi) {
  require(phi >= 0.0 && phi <= 1.0, "degradation_g_deriv: phi out of [0, 1]");
  return -2.0 * (1.0 - phi);
}

double degradation_gp(double phi, double beta) {
  require(phi >= 0.0 && phi <= 1.0, "degradation_gp: phi out of [0, 1]");
  require(beta >= 0.0 && beta <= 1.0, "degradation_gp: beta out of [0, 1]");
  return beta * degradation_g(phi) - beta + 1.0;
}

double flow_stress(double eps_p_eq, const MaterialParams& p) {
  require(eps_p_eq >= 0.0, "flow_stress: eps_p_eq must be non-negative");
  return p.sigma_y0 * std::pow(1.0 + p.E * eps_p_eq / p.sigma_y0, p.n);
}

double hardening_modulus(double eps_p_eq, const MaterialParams& p) {
  if (p.n == 0.0) return 0.0;
  return p.E * p.n * std::pow(1.0 + p.E * eps_p_eq / p.sigma_y0, p.n - 1.0);
}

double plastic_energy(double eps_p_eq, const MaterialParams& p) {
  require(eps_p_eq >= 0.0, "plastic_energy: eps_p_eq must be non-negative");
  const double c = p.sigma_y0 * p.sigma_y0 / (p.E * (p.n + 1.0));
  return c * (std::pow(1.0 + p.E * eps_p_eq / p.sigma_y0, p.n + 1.0) - 1.0);
}

double elastic_driving_energy(const SymTensor2& eps_e, const MaterialParams& p) {
  const double vol = eps_e.trace();
  const SymTensor2 dev = eps_e.deviator();
  const double v = macaulay(vol);
  return 0.5 * p.bulk() * v * v + p.shear() * dev.norm_sq();
}

StressUpdateResult stress_update(const SymTensor2& eps_trial, const PointState& state_old,
                                 const MaterialParams& p) {
  StressUpdateResult out;
  PointState& st = out.state;
  st = state_old;
  st.eps = eps_trial;

  const double phi = state_old.phi;
  require(phi >= 0.0 && phi <= 1.0, "stress_update: phi out of [0, 1]");
  const double g = degradation_g(phi) + kResidualStiffness;
  const double gp = degradation_gp(phi, p.beta);
  const double kappa = p.bulk();
  const double mu = g * p.shear();

  const SymTensor2 eps_eff = eps_trial + state_old.eps0;
  const SymTensor2 eps_e_trial = eps_eff - state_old.eps_p;
  const double vol = eps_e_trial.trace();
  const SymTensor2 dev_e = eps_e_trial.deviator();
  const SymTensor2 s_trial = 2.0 * mu * dev_e;
  const double q_trial = std::sqrt(1.5) * std::sqrt(s_trial.norm_sq());

  const double tol = 1e-10 * p.sigma_y0;
  double flow = gp * flow_stress(state_old.eps_p_eq, p);
  double dlam = 0.0;
  double hard = 0.0;
  bool plastic = q_trial - flow > tol;

  if (plastic) {
    // Scalar Newton for the plastic multiplier on
    //   q_trial - 3 mu dlam = gp * flow_stress(e_old + dlam).
    double lo = 0.0;
    double hi = q_trial / (3.0 * mu);
    int it = 0;
    const int max_it = 100;
    for (; it < max_it; ++it) {
      const double f = gp * flow_stress(state_old.eps_p_eq + dlam, p);
      const double r = q_trial - 3.0 * mu * dlam - f;
      if (std::abs(r) <= tol) break;
      if (r > 0.0)
        lo = dlam;
      else
        hi = dlam;
      const double dr = -3.0 * mu - gp * hardening_modulus(state_old.eps_p_eq + dlam, p);
      if (!(dr < 0.0))
        throw std::runtime_error("stress_update: non-negative local Newton Jacobian");
      double next = dlam - r / dr;
      if (next <= lo || next >= hi) next = 0.5 * (lo + hi);  // bisection fallback
      dlam = next;
    }
    if (it == max_it)
      throw std::runtime_error("stress_update: return mapping failed to converge after 100 iterations");
    out.iterations = it + 1;
    hard = gp * hardening_modulus(state_old.eps_p_eq + dlam, p);

    const SymTensor2 n_dir = (1.5 / q_trial) * s_trial;  // flow direction, n:n = 3/2
    st.eps_p = state_old.eps_p + dlam * n_dir;
    st.eps_p_eq = state_old.eps_p_eq + dlam;
    out.delta_eps_p_eq = dlam;
    flow = gp * flow_stress(st.eps_p_eq, p);
    out.yield_residual = q_trial - 3.0 * mu * dlam - flow;
  } else {
    out.yield_residual = q_trial - flow;
  }

  const double ratio = plastic ? 1.0 - 3.0 * mu * dlam / q_trial : 1.0;
  const SymTensor2 s_new = ratio * s_trial;
  const double p_stress = vol >= 0.0 ? kappa * g * vol : kappa * vol;
  st.sigma = s_new;
  st.sigma.xx += p_stress;
  st.sigma.yy += p_stress;
  st.sigma.zz += p_stress;
  out.sigma = st.sigma;

  st.psi_p = plastic_energy(st.eps_p_eq, p);
  st.work_density = state_old.work_density +
                    0.5 * (st.sigma + state_old.sigma).contract(eps_trial - state_old.eps);
  st.plastic_dissipation = state_old.plastic_dissipation +
                           0.5 * (st.sigma + state_old.sigma).contract(st.eps_p - state_old.eps_p);

  // Consistent tangent: volumetric branch + deviatoric part.
  const double kb = vol >= 0.0 ? kappa * g : kappa;
  double gamma = 0.0;
  double nvec[3] = {0.0, 0.0, 0.0};
  if (plastic) {
    gamma = 9.0 * mu * mu * (1.0 / (3.0 * mu + hard) - dlam / q_trial);
    nvec[0] = s_trial.xx / q_trial;
    nvec[1] = s_trial.yy / q_trial;
    nvec[2] = s_trial.xy / q_trial;
  }
  const double two_mu = 2.0 * mu * ratio;
  const double d = two_mu * (2.0 / 3.0);
  const double o = two_mu * (-1.0 / 3.0);
  out.tangent[0][0] = kb + d - gamma * nvec[0] * nvec[0];
  out.tangent[0][1] = kb + o - gamma * nvec[0] * nvec[1];
  out.tangent[0][2] = -gamma * nvec[0] * nvec[2];
  out.tangent[1][0] = kb + o - gamma * nvec[1] * nvec[0];
  out.tangent[1][1] = kb + d - gamma * nvec[1] * nvec[1];
  out.tangent[1][2] = -gamma * nvec[1] * nvec[2];
  out.tangent[2][0] = -gamma * nvec[2] * nvec[0];
  out.tangent[2][1] = -gamma * nvec[2] * nvec[1];
  out.tangent[2][2] = 0.5 * two_mu - gamma * nvec[2] * nvec[2];
  return out;
}

double hydrogen_toughness_factor(double C, const HydrogenParams& p) {
  require(C >= 0.0, "hydrogen_toughness_factor: C must be non-negative");
  return p.f_min + (1.0 - p.f_min) * std::exp(-p.q1 * std::pow(C, p.q2));
}

double sievert_concentration(double pressure, double S) {
  require(pressure >= 0.0, "sievert_concentration: pressure must be non-negative");
  return S * std::sqrt(pressure);
}

double critical_stress_1d(const MaterialParams& p) {
  return std::sqrt(27.0 * p.E * p.Gc / (256.0 * p.ell));
}

double length_scale_for_ductility(double r_y, const MaterialParams& p) {
  require(r_y > 0.0, "length_scale_for_ductility: r_y must be positive");
  const double sc = r_y * p.sigma_y0;
  return 27.0 * p.E * p.Gc / (256.0 * sc * sc);
}

double UniaxialCurve::strain_at_drop(double fraction) const {
  bool past_peak = false;
  for (const auto& pt : points) {
    if (pt.strain >= strain_at_peak) past_peak = true;
    if (past_peak && pt.stress <= fraction * sigma_u) return pt.strain;
  }
  return points.empty() ? 0.0 : points.back().strain;
}

namespace {

// Scalar 1D stress update: sigma = g E (eps - eps_p), yield on |sigma|.
struct Scalar1DState {
  double eps_p = 0.0;
  double H = 0.0;
  double phi = 0.0;
};

double scalar_stress(double eps, Scalar1DState& st, const MaterialParams& p) {
  const double g = degradation_g(st.phi) + kResidualStiffness;
  const double gp = degradation_gp(st.phi, p.beta);
  double sig = g * p.E * (eps - st.eps_p);
  double flow = gp * flow_stress(st.eps_p, p);
  if (std::abs(sig) > flow + 1e-10 * p.sigma_y0) {
    const double sign = sig >= 0.0 ? 1.0 : -1.0;
    double dlam = 0.0;
    double lo = 0.0, hi = std::abs(sig) / (g * p.E);
    for (int it = 0; it < 100; ++it) {
      const double f = gp * flow_stress(st.eps_p + dlam, p);
      const double r = std::abs(sig) - g * p.E * dlam - f;
      if (std::abs(r) <= 1e-12 * p.sigma_y0) break;
      if (r > 0.0)
        lo = dlam;
      else
        hi = dlam;
      const double dr = -g * p.E - gp * hardening_modulus(st.eps_p + dlam, p);
      double next = dlam - r / dr;
      if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
      dlam = next;
    }
    st.eps_p += sign * dlam;
    sig = g * p.E * (eps - st.eps_p);
  }
  const double eps_e = eps - st.eps_p;
  st.H = std::max(st.H, 0.5 * p.E * eps_e * eps_e);
  return sig;
}

double local_phi(double drive, const MaterialParams& p) {
  // (Gc/l) phi = 2 (1-phi) drive
  const double a = 2.0 * drive;
  return a / (p.Gc / p.ell + a);
}

}  // namespace

UniaxialCurve homogeneous_1d_response(const MaterialParams& p,
                                      const std::vector<double>& strain_grid) {
  p.validate();
  UniaxialCurve curve;
  curve.points.reserve(strain_grid.size());
  Scalar1DState st;
  double prev = -1.0;
  for (double eps : strain_grid) {
    if (eps < prev) throw std::domain_error("homogeneous_1d_response: strain grid must be non-decreasing");
    prev = eps;
    // Damped alternation between the stress update and the scalar phi balance.
    double phi = st.phi;
    Scalar1DState trial;
    for (int it = 0; it < 500; ++it) {
      trial = st;
      trial.phi = phi;
      scalar_stress(eps, trial, p);
      const double psi_p = plastic_energy(std::abs(trial.eps_p), p);
      const double drive = trial.H + p.beta * psi_p;
      const double phi_new = std::max(st.phi, local_phi(drive, p));
      const double dphi = phi_new - phi;
      phi += 0.5 * dphi;
      if (std::abs(dphi) < 1e-10) break;
      if (it == 499)
        throw std::runtime_error("homogeneous_1d_response: local coupled iteration did not converge");
    }
    st = trial;
    st.phi = phi;
    Scalar1DState eval = st;
    const double sig = scalar_stress(eps, eval, p);
    st = eval;
    st.phi = phi;
    curve.points.push_back({eps, sig, phi, std::abs(st.eps_p)});
    if (sig > curve.sigma_u) {
      curve.sigma_u = sig;
      curve.strain_at_peak = eps;
    }
  }
  return curve;
}

UniaxialCurve homogeneous_1d_response(const MaterialParams& p) {
  // March with a grid fine relative to the elastic critical strain until the
  // response has clearly passed its peak.
  const double eps_c = critical_stress_1d(p) / p.E;
  const double deps = std::max(eps_c, p.sigma_y0 / p.E) / 400.0;
  std::vector<double> grid;
  grid.reserve(20000);
  double eps = 0.0;
  UniaxialCurve curve;
  Scalar1DState st;
  double peak = 0.0, peak_eps = 0.0;
  while (eps < 1.0) {
    eps += deps;
    grid.push_back(eps);
    if (grid.size() > 200000) break;
    // Evaluate incrementally to know when to stop.
    double phi = st.phi;
    Scalar1DState trial;
    for (int it = 0; it < 500; ++it) {
      trial = st;
      trial.phi = phi;
      scalar_stress(eps, trial, p);
      const double drive = trial.H + p.beta * plastic_energy(std::abs(trial.eps_p), p);
      const double phi_new = std::max(st.phi, local_phi(drive, p));
      const double dphi = phi_new - phi;
      phi += 0.5 * dphi;
      if (std::abs(dphi) < 1e-10) break;
    }
    st = trial;
    st.phi = phi;
    Scalar1DState eval = st;
    const double sig = scalar_stress(eps, eval, p);
    st = eval;
    st.phi = phi;
    curve.points.push_back({eps, sig, phi, std::abs(st.eps_p)});
    if (sig > peak) {
      peak = sig;
      peak_eps = eps;
    }
    if (sig < 0.5 * peak && peak > 0.0) break;
  }
  curve.sigma_u = peak;
  curve.strain_at_peak = peak_eps;
  return curve;
}

double ultimate_stress_1d(const MaterialParams& p) { return homogeneous_1d_response(p).sigma_u; }

UniaxialCurve uniaxial_stress_response(const MaterialParams& p,
                                       const std::vector<double>& strain_grid, bool couple_phi) {
  p.validate();
  UniaxialCurve curve;
  curve.points.reserve(strain_grid.size());
  PointState state;
  double lat_x = 0.0, lat_z = 0.0;  // lateral strains
  for (double eps : strain_grid) {
    double phi = state.phi;
    PointState converged = state;
    StressUpdateResult res;
    for (int outer = 0; outer < 500; ++outer) {
      PointState base = state;
      base.phi = phi;
      // Newton on the lateral strains so that sigma_xx = sigma_zz = 0.
      for (int it = 0; it < 60; ++it) {
        SymTensor2 eps_t{lat_x, eps, lat_z, 0.0};
        res = stress_update(eps_t, base, p);
        const double rx = res.sigma.xx;
        const double rz = res.sigma.zz;
        if (std::abs(rx) < 1e-12 * p.E && std::abs(rz) < 1e-12 * p.E) break;
        const double h = 1e-8;
        SymTensor2 ex{lat_x + h, eps, lat_z, 0.0};
        const auto rx2 = stress_update(ex, base, p);
        SymTensor2 ez{lat_x, eps, lat_z + h, 0.0};
        const auto rz2 = stress_update(ez, base, p);
        const double j00 = (rx2.sigma.xx - rx) / h, j01 = (rz2.sigma.xx - rx) / h;
        const double j10 = (rx2.sigma.zz - rz) / h, j11 = (rz2.sigma.zz - rz) / h;
        const double det = j00 * j11 - j01 * j10;
        if (std::abs(det) < 1e-30) throw std::runtime_error("uniaxial_stress_response: singular Jacobian");
        lat_x -= (j11 * rx - j01 * rz) / det;
        lat_z -= (-j10 * rx + j00 * rz) / det;
      }
      converged = res.state;
      if (!couple_phi) break;
      const SymTensor2 eps_e = converged.eps + converged.eps0 - converged.eps_p;
      const double H = std::max(state.H, elastic_driving_energy(eps_e, p));
      const double drive = H + p.beta * converged.psi_p;
      const double phi_new = std::max(state.phi, local_phi(drive, p));
      const double dphi = phi_new - phi;
      phi += 0.5 * dphi;
      converged.H = H;
      if (std::abs(dphi) < 1e-10) break;
      if (outer == 499)
        throw std::runtime_error("uniaxial_stress_response: coupled iteration did not converge");
    }
    converged.phi = phi;
    if (!couple_phi) {
      const SymTensor2 eps_e = converged.eps + converged.eps0 - converged.eps_p;
      converged.H = std::max(state.H, elastic_driving_energy(eps_e, p));
    }
    state = converged;
    curve.points.push_back({eps, state.sigma.yy, state.phi, state.eps_p_eq});
    if (state.sigma.yy > curve.sigma_u) {
      curve.sigma_u = state.sigma.yy;
      curve.strain_at_peak = eps;
    }
  }
  return curve;
}

}  // namespace fadforge
