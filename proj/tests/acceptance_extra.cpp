// Criteria 8 (diffusion oracles) and 11 (invariant property suite).

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "acceptance_common.hpp"
#include "fadforge/campaigns.hpp"
#include "fadforge/hydrogen.hpp"
#include "fadforge/io.hpp"
#include "fadforge/meshgen.hpp"

using namespace fadforge;

namespace {
const auto& fmt = acc_fmt;

Mesh bar_mesh(int nx, double length, double height) {
  std::vector<double> xs, ys{0.0, height};
  for (int i = 0; i <= nx; ++i) xs.push_back(length * i / nx);
  StructuredMeshBuilder b(xs, ys);
  return b.build();
}

double total_mass(const Simulation& sim) {
  double m = 0.0;
  for (int e = 0; e < sim.mesh().n_elems(); ++e)
    for (int q = 0; q < 4; ++q) m += sim.geometry(e)[q].weight * sim.conc_at(e, q);
  return m;
}

}  // namespace

Checker acceptance_criterion8() {
  Checker c;
  MaterialParams mat;
  HydrogenParams hyd;

  // (a) Steady 1D drift against C0 exp(Vh sigma_h / (R T)).
  {
    const int nx = 600;
    Mesh mesh = bar_mesh(nx, 1.0, 1.0 / nx);
    SolverConfig cfg;
    cfg.enable_phase_field = false;
    Simulation sim(mesh, mat, cfg);
    sim.set_hydrogen(hyd);
    const double sig_max = 0.4 * hyd.R * hyd.T / hyd.Vh;  // exponent reaches 0.4
    for (int n = 0; n < mesh.n_nodes(); ++n)
      sim.state().sigma_h[n] = sig_max * sim.mesh().nodes[n].x;
    ConcentrationBC left;
    for (int n = 0; n < mesh.n_nodes(); ++n)
      if (sim.mesh().nodes[n].x < 1e-12) left.nodes.push_back(n);
    const double C0 = 1.0;
    left.value = [C0](const Simulation&) { return C0; };
    sim.add_concentration_bc(std::move(left));
    stationary_concentration(sim);
    double max_rel = 0.0;
    for (int n = 0; n < mesh.n_nodes(); ++n) {
      const double x = sim.mesh().nodes[n].x;
      const double ref = C0 * std::exp(hyd.Vh * sig_max * x / (hyd.R * hyd.T));
      max_rel = std::max(max_rel, std::abs(sim.state().conc[n] - ref) / ref);
    }
    c.note("drift profile max rel err " + fmt(max_rel));
    c.require(max_rel <= 1e-6, "steady drift profile error " + fmt(max_rel) + " > 1e-6");
  }

  // (b) Zero-stress steady state is linear to 1e-10.
  {
    const int nx = 40;
    Mesh mesh = bar_mesh(nx, 2.0, 0.05);
    SolverConfig cfg;
    cfg.enable_phase_field = false;
    Simulation sim(mesh, mat, cfg);
    sim.set_hydrogen(hyd);
    ConcentrationBC l, r;
    for (int n = 0; n < mesh.n_nodes(); ++n) {
      if (sim.mesh().nodes[n].x < 1e-12) l.nodes.push_back(n);
      if (sim.mesh().nodes[n].x > 2.0 - 1e-12) r.nodes.push_back(n);
    }
    l.value = [](const Simulation&) { return 1.0; };
    r.value = [](const Simulation&) { return 0.0; };
    sim.add_concentration_bc(std::move(l));
    sim.add_concentration_bc(std::move(r));
    stationary_concentration(sim);
    double max_err = 0.0;
    for (int n = 0; n < mesh.n_nodes(); ++n) {
      const double ref = 1.0 - sim.mesh().nodes[n].x / 2.0;
      max_err = std::max(max_err, std::abs(sim.state().conc[n] - ref));
    }
    c.note("linear profile max err " + fmt(max_err));
    c.require(max_err <= 1e-10, "zero-stress steady state deviates from linear by " + fmt(max_err));

    // Transient relaxes to the same profile.
    Simulation sim2(mesh, mat, cfg);
    sim2.set_hydrogen(hyd);
    ConcentrationBC l2 = {};
    ConcentrationBC r2 = {};
    for (int n = 0; n < mesh.n_nodes(); ++n) {
      if (sim2.mesh().nodes[n].x < 1e-12) l2.nodes.push_back(n);
      if (sim2.mesh().nodes[n].x > 2.0 - 1e-12) r2.nodes.push_back(n);
    }
    l2.value = [](const Simulation&) { return 1.0; };
    r2.value = [](const Simulation&) { return 0.0; };
    sim2.add_concentration_bc(std::move(l2));
    sim2.add_concentration_bc(std::move(r2));
    const double t_diff = 4.0 / hyd.D;  // several diffusion times
    for (int k = 0; k < 80; ++k) diffusion_step(sim2, t_diff / 80.0);
    double trans_err = 0.0;
    for (int n = 0; n < mesh.n_nodes(); ++n) {
      const double ref = 1.0 - sim2.mesh().nodes[n].x / 2.0;
      trans_err = std::max(trans_err, std::abs(sim2.state().conc[n] - ref));
    }
    c.note("transient-to-steady err " + fmt(trans_err));
    c.require(trans_err <= 1e-4, "transient did not converge to the steady profile");
  }

  // (c) Mass conservation with zero flux everywhere and a stress gradient.
  {
    const int nx = 50;
    Mesh mesh = bar_mesh(nx, 1.0, 0.05);
    SolverConfig cfg;
    cfg.enable_phase_field = false;
    Simulation sim(mesh, mat, cfg);
    sim.set_hydrogen(hyd);
    for (int n = 0; n < mesh.n_nodes(); ++n) {
      const double x = sim.mesh().nodes[n].x;
      sim.state().conc[n] = 1.0 + 0.3 * std::sin(6.28318530717958648 * x);
      sim.state().sigma_h[n] = 300.0 * x;
    }
    double m_prev = total_mass(sim);
    double worst = 0.0;
    for (int k = 0; k < 25; ++k) {
      diffusion_step(sim, 120.0);
      const double m = total_mass(sim);
      worst = std::max(worst, std::abs(m - m_prev) / m_prev);
      m_prev = m;
    }
    c.note("mass drift per step " + fmt(worst));
    c.require(worst <= 1e-8, "mass conservation drift " + fmt(worst) + " > 1e-8 per step");
  }
  return c;
}

Checker acceptance_criterion11() {
  Checker c;
  std::mt19937 rng(2024);

  // FAL monotonicity and f(0)=1 over random materials.
  {
    std::uniform_real_distribution<double> dE(80000.0, 400000.0), dsy(200.0, 1200.0),
        dsu(1.05, 1.8);
    for (int k = 0; k < 20; ++k) {
      const double E = dE(rng), sy = dsy(rng), su = dsu(rng) * sy;
      const auto fal = build_fal(FalOption::opt1, E, sy, cutoff_lr_max(sy, su));
      c.require(std::abs(fal.f.front() - 1.0) < 1e-9, "f(0) != 1");
      for (size_t i = 1; i < fal.f.size(); ++i)
        c.require(fal.f[i] <= fal.f[i - 1] + 1e-12, "FAL not monotone");
    }
  }

  // Air loading paths are rays: any three path points are collinear.
  {
    std::uniform_real_distribution<double> dp(1.0, 5000.0);
    const double W = 5.0, a0 = 1.5, Kc = 2000.0, Py = 3234.0;
    for (int k = 0; k < 20; ++k) {
      double loads[3] = {dp(rng), dp(rng), dp(rng)};
      AssessmentPoint p[3];
      for (int i = 0; i < 3; ++i)
        p[i] = assessment_point(sent_sif(loads[i], 1.0, W, a0), Kc, loads[i], Py);
      const double cross = p[0].Lr * (p[1].Kr - p[2].Kr) + p[1].Lr * (p[2].Kr - p[0].Kr) +
                           p[2].Lr * (p[0].Kr - p[1].Kr);
      c.require(std::abs(cross) <= 1e-9, "air path points not collinear");
    }
  }

  // Safety-factor ray scaling.
  {
    const auto fal = build_fal(FalOption::opt1, 200000.0, 800.0, 1.2);
    std::uniform_real_distribution<double> dl(0.05, 1.1), dk(0.05, 1.0), ds(0.3, 2.5);
    for (int k = 0; k < 20; ++k) {
      AssessmentPoint a{dl(rng), dk(rng), "", 0.0};
      const double s = ds(rng);
      const double sf_a = safety_factor(a, fal);
      const double sf_b = safety_factor({s * a.Lr, s * a.Kr, "", 0.0}, fal);
      c.require(std::abs(sf_b - sf_a / s) <= 1e-6 * sf_a, "safety factor scaling violated");
    }
  }

  // KKT residuals at random material points.
  {
    MaterialParams p;
    p.E = 200000.0;
    p.nu = 0.3;
    p.sigma_y0 = 800.0;
    p.n = 0.1;
    p.Gc = 20.0;
    p.ell = 0.3;
    std::uniform_real_distribution<double> de(-8e-3, 8e-3), dphi(0.0, 0.9);
    for (int k = 0; k < 100; ++k) {
      PointState st;
      st.phi = dphi(rng);
      const auto r = stress_update({de(rng), de(rng), de(rng), de(rng)}, st, p);
      c.require(r.delta_eps_p_eq >= 0.0, "negative plastic increment");
      c.require(r.yield_residual <= 1e-6 * p.sigma_y0, "yield residual too large");
      c.require(std::abs(r.delta_eps_p_eq * r.yield_residual) <= 1e-6 * p.sigma_y0,
                "complementarity violated");
    }
  }

  // Small coupled run: phi bounds, monotone H / eps_p / psi_p, staggered
  // fixed point.
  {
    MaterialParams mat;
    mat.E = 200000.0;
    mat.nu = 0.3;
    mat.sigma_y0 = 800.0;
    mat.n = 0.1;
    mat.Gc = 40.0;
    mat.ell = length_scale_for_ductility(1.5, mat);
    SentSetup s;
    s.mat = mat;
    s.solver.n_steps = 30;
    s.h_fine = mat.ell / 4.0;
    auto sim = make_sent_simulation(s);

    std::vector<double> H_prev, ep_prev, pp_prev;
    const int ne = sim->mesh().n_elems();
    H_prev.assign(size_t(ne) * 4, 0.0);
    ep_prev.assign(size_t(ne) * 4, 0.0);
    pp_prev.assign(size_t(ne) * 4, 0.0);
    bool failed_check = false;
    for (int step = 1; step <= 12 && !failed_check; ++step) {
      const auto rep = sim->staggered_step(step * 0.05);
      c.require(rep.converged, "staggered step failed in the invariant run");
      if (!rep.converged) break;
      const double lo = sim->state().phi.minCoeff();
      const double hi = sim->state().phi.maxCoeff();
      c.require(lo >= -1e-8 && hi <= 1.0 + 1e-8,
                "phi left [0,1]: " + fmt(lo) + " .. " + fmt(hi));
      for (int e = 0; e < ne; ++e)
        for (int q = 0; q < 4; ++q) {
          const auto& st = sim->state().qp[e][q];
          const size_t idx = size_t(e) * 4 + q;
          if (st.H < H_prev[idx] - 1e-9 || st.eps_p_eq < ep_prev[idx] - 1e-12 ||
              st.psi_p < pp_prev[idx] - 1e-9) {
            c.require(false, "history/plastic monotonicity violated");
            failed_check = true;
          }
          H_prev[idx] = st.H;
          ep_prev[idx] = st.eps_p_eq;
          pp_prev[idx] = st.psi_p;
        }
      // One extra staggered pass stays below the stagger tolerance.
      if (step == 6) {
        const auto again = sim->staggered_step(sim->state().lambda);
        c.require(again.converged && again.last_dphi < sim->config().stagger_tol,
                  "staggered state is not a fixed point");
      }
    }
  }
  return c;
}
