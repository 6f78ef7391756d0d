#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "fadforge/material.hpp"

using namespace fadforge;

namespace {

MaterialParams table1() {
  MaterialParams p;
  p.E = 200000.0;
  p.nu = 0.3;
  p.sigma_y0 = 800.0;
  p.n = 0.1;
  p.Gc = 5.0;
  p.ell = 0.4;
  p.beta = 0.1;
  return p;
}

SymTensor2 isotropic_stress(const SymTensor2& eps, const MaterialParams& p) {
  const double lambda = p.bulk() - 2.0 / 3.0 * p.shear();
  const double tr = eps.trace();
  SymTensor2 s = 2.0 * p.shear() * eps;
  s.xx += lambda * tr;
  s.yy += lambda * tr;
  s.zz += lambda * tr;
  return s;
}

}  // namespace

TEST_CASE("degradation functions") {
  CHECK(degradation_g(0.0) == doctest::Approx(1.0));
  CHECK(degradation_g(1.0) == doctest::Approx(0.0));
  CHECK(degradation_g(0.5) == doctest::Approx(0.25));
  CHECK(degradation_gp(0.0, 0.1) == doctest::Approx(1.0));
  CHECK(degradation_gp(1.0, 0.1) == doctest::Approx(0.9));
  CHECK(degradation_gp(0.5, 0.1) == doctest::Approx(0.925));
  CHECK_THROWS_AS(degradation_g(-0.1), std::domain_error);
  CHECK_THROWS_AS(degradation_g(1.1), std::domain_error);
  CHECK_THROWS_AS(degradation_gp(0.5, 1.5), std::domain_error);

  // g in [0,1], gp in [1-beta, 1], both monotone non-increasing.
  for (double beta : {0.0, 0.1, 0.5, 1.0}) {
    double prev_g = 2.0, prev_gp = 2.0;
    for (int i = 0; i <= 100; ++i) {
      const double phi = i / 100.0;
      const double g = degradation_g(phi);
      const double gp = degradation_gp(phi, beta);
      CHECK(g >= 0.0);
      CHECK(g <= 1.0);
      CHECK(gp >= 1.0 - beta - 1e-15);
      CHECK(gp <= 1.0 + 1e-15);
      CHECK(g <= prev_g + 1e-15);
      CHECK(gp <= prev_gp + 1e-15);
      prev_g = g;
      prev_gp = gp;
    }
  }
}

TEST_CASE("plastic energy density") {
  auto p = table1();
  CHECK(plastic_energy(0.0, p) == doctest::Approx(0.0));
  CHECK_THROWS_AS(plastic_energy(-1e-6, p), std::domain_error);

  // d(psi_p)/d(eps_p) equals the flow stress (finite differences).
  for (double e : {0.001, 0.01, 0.05, 0.2}) {
    const double h = 1e-6;
    const double fd = (plastic_energy(e + h, p) - plastic_energy(e - h, p)) / (2 * h);
    CHECK(fd == doctest::Approx(flow_stress(e, p)).epsilon(1e-4));
  }

  // Trapezoid quadrature of the flow stress as an independent oracle.
  const double e_end = 0.05;
  const int n = 200000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = e_end * i / n, b = e_end * (i + 1) / n;
    acc += 0.5 * (flow_stress(a, p) + flow_stress(b, p)) * (b - a);
  }
  CHECK(plastic_energy(e_end, p) == doctest::Approx(acc).epsilon(1e-6));

  // Convexity: increasing derivative.
  CHECK(flow_stress(0.02, p) > flow_stress(0.01, p));
}

TEST_CASE("elastic driving energy (Amor split)") {
  auto p = table1();
  CHECK(elastic_driving_energy({}, p) == doctest::Approx(0.0));

  // Pure hydrostatic compression: Macaulay bracket kills the volumetric term
  // and there is no deviatoric part.
  SymTensor2 comp{-1e-3, -1e-3, -1e-3, 0.0};
  CHECK(elastic_driving_energy(comp, p) == doctest::Approx(0.0));

  // Uniaxial elastic strain in plane strain, against a brute-force
  // decomposition written out independently.
  SymTensor2 eps{0.0, 2e-3, 0.0, 0.0};
  const double vol = eps.xx + eps.yy + eps.zz;
  const double m = vol / 3.0;
  const double dxx = eps.xx - m, dyy = eps.yy - m, dzz = eps.zz - m;
  const double dev2 = dxx * dxx + dyy * dyy + dzz * dzz;
  const double expected = 0.5 * p.bulk() * vol * vol + p.shear() * dev2;
  CHECK(elastic_driving_energy(eps, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("stress update: elastic predictor and Macaulay branches") {
  auto p = table1();
  PointState st;

  // Below yield: linear elastic response, no plastic flow.
  SymTensor2 eps{1e-4, 5e-4, 0.0, 2e-4};
  auto res = stress_update(eps, st, p);
  const auto iso = isotropic_stress(eps, p);
  CHECK(res.sigma.xx == doctest::Approx(iso.xx).epsilon(1e-6));
  CHECK(res.sigma.yy == doctest::Approx(iso.yy).epsilon(1e-6));
  CHECK(res.sigma.zz == doctest::Approx(iso.zz).epsilon(1e-6));
  CHECK(res.sigma.xy == doctest::Approx(iso.xy).epsilon(1e-6));
  CHECK(res.state.eps_p_eq == 0.0);

  // Amor split at phi = 0 equals isotropic elasticity for random strains.
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-2e-3, 2e-3);
  for (int k = 0; k < 50; ++k) {
    SymTensor2 e{dist(rng), dist(rng), dist(rng), dist(rng)};
    MaterialParams elastic = p;
    elastic.sigma_y0 = 1e9;  // keep the point elastic
    PointState fresh;
    const auto r = stress_update(e, fresh, elastic);
    const auto ref = isotropic_stress(e, elastic);
    CHECK(r.sigma.xx == doctest::Approx(ref.xx).epsilon(1e-6));
    CHECK(r.sigma.yy == doctest::Approx(ref.yy).epsilon(1e-6));
    CHECK(r.sigma.zz == doctest::Approx(ref.zz).epsilon(1e-6));
    CHECK(r.sigma.xy == doctest::Approx(ref.xy).epsilon(1e-6));
  }

  // Hydrostatic compression at phi = 0.99: the compressive branch keeps the
  // undegraded bulk response.
  PointState broken;
  broken.phi = 0.99;
  SymTensor2 hyd{-1e-3, -1e-3, -1e-3, 0.0};
  const auto rb = stress_update(hyd, broken, p);
  CHECK(rb.sigma.xx == doctest::Approx(p.bulk() * hyd.trace()).epsilon(1e-9));
  CHECK(rb.sigma.xy == doctest::Approx(0.0));
  CHECK(rb.state.eps_p_eq == 0.0);
}

TEST_CASE("stress update: KKT conditions over random loading") {
  auto p = table1();
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(-8e-3, 8e-3);
  std::uniform_real_distribution<double> phid(0.0, 0.8);
  for (int k = 0; k < 200; ++k) {
    PointState st;
    st.phi = phid(rng);
    SymTensor2 e{dist(rng), dist(rng), dist(rng), dist(rng)};
    const auto r = stress_update(e, st, p);
    CHECK(r.delta_eps_p_eq >= 0.0);
    CHECK(r.yield_residual <= 1e-6 * p.sigma_y0);
    CHECK(std::abs(r.delta_eps_p_eq * r.yield_residual) <= 1e-6 * p.sigma_y0);
    // History-style monotonicity.
    CHECK(r.state.eps_p_eq >= st.eps_p_eq);
    CHECK(r.state.psi_p >= st.psi_p - 1e-15);
  }
}

TEST_CASE("stress update: consistent tangent vs finite differences") {
  auto p = table1();
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(-6e-3, 6e-3);
  for (int k = 0; k < 20; ++k) {
    PointState st;
    st.phi = 0.3;
    SymTensor2 e{dist(rng), dist(rng), 0.0, dist(rng)};
    const auto r0 = stress_update(e, st, p);
    const double h = 1e-8;
    double fd[3][3];
    for (int j = 0; j < 3; ++j) {
      SymTensor2 ep = e, em = e;
      if (j == 0) {
        ep.xx += h;
        em.xx -= h;
      } else if (j == 1) {
        ep.yy += h;
        em.yy -= h;
      } else {
        ep.xy += 0.5 * h;  // gamma perturbation
        em.xy -= 0.5 * h;
      }
      const auto rp = stress_update(ep, st, p);
      const auto rm = stress_update(em, st, p);
      fd[0][j] = (rp.sigma.xx - rm.sigma.xx) / (2 * h);
      fd[1][j] = (rp.sigma.yy - rm.sigma.yy) / (2 * h);
      fd[2][j] = (rp.sigma.xy - rm.sigma.xy) / (2 * h);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(r0.tangent[i][j] == doctest::Approx(fd[i][j]).epsilon(2e-4).scale(p.E));
  }
}

TEST_CASE("uniaxial stress hardening curve matches the closed form") {
  auto p = table1();
  p.Gc = 1000.0;  // keep damage away; phi frozen by couple_phi = false anyway
  std::vector<double> grid;
  for (int i = 1; i <= 60; ++i) grid.push_back(2.5e-4 * i);
  const auto curve = uniaxial_stress_response(p, grid, false);
  bool checked_plastic = false;
  for (const auto& pt : curve.points) {
    if (pt.eps_p_eq > 1e-8) {
      checked_plastic = true;
      CHECK(pt.stress ==
            doctest::Approx(flow_stress(pt.eps_p_eq, p)).epsilon(1e-8));
    }
  }
  CHECK(checked_plastic);
}

TEST_CASE("hydrogen toughness factor") {
  HydrogenParams h;  // Table-like defaults: f_min 0.65, q1 30, q2 1
  CHECK(hydrogen_toughness_factor(0.0, h) == doctest::Approx(1.0));
  CHECK(hydrogen_toughness_factor(1e9, h) == doctest::Approx(0.65));
  const double f = hydrogen_toughness_factor(0.17, h);
  CHECK(f == doctest::Approx(0.65 + 0.35 * std::exp(-30.0 * 0.17)).epsilon(1e-12));
  CHECK(f == doctest::Approx(0.652).epsilon(1e-3));
  // Monotone non-increasing, range (f_min, 1].
  double prev = 1.1;
  for (double c = 0.0; c <= 2.0; c += 0.01) {
    const double v = hydrogen_toughness_factor(c, h);
    CHECK(v <= prev + 1e-15);
    CHECK(v > h.f_min - 1e-12);
    CHECK(v <= 1.0);
    prev = v;
  }
  CHECK_THROWS_AS(hydrogen_toughness_factor(-1.0, h), std::domain_error);
}

TEST_CASE("Sievert boundary concentration") {
  CHECK(sievert_concentration(0.0, 0.077) == doctest::Approx(0.0));
  CHECK(sievert_concentration(5.0, 0.077) == doctest::Approx(0.077 * std::sqrt(5.0)).epsilon(1e-15));
  CHECK(sievert_concentration(5.0, 0.077) == doctest::Approx(0.172).epsilon(2e-3));
  CHECK(sievert_concentration(10.0, 0.077) == doctest::Approx(0.2435).epsilon(1e-3));
  CHECK_THROWS_AS(sievert_concentration(-1.0, 0.077), std::domain_error);
}

TEST_CASE("1D critical stress and the ductility length scale") {
  auto p = table1();
  p.Gc = 5.0;
  p.ell = 0.4;
  CHECK(critical_stress_1d(p) == doctest::Approx(513.0).epsilon(5e-3));
  p.Gc = 80.0;
  CHECK(critical_stress_1d(p) == doctest::Approx(2054.0).epsilon(5e-3));
  // Square-root homogeneity in Gc.
  p.Gc = 20.0;
  const double s1 = critical_stress_1d(p);
  p.Gc = 80.0;
  CHECK(critical_stress_1d(p) == doctest::Approx(2.0 * s1).epsilon(1e-12));

  p.Gc = 5.0;
  CHECK(length_scale_for_ductility(1.5, p) == doctest::Approx(0.0732422).epsilon(1e-4));
  p.Gc = 88.0;
  CHECK(length_scale_for_ductility(1.5, p) == doctest::Approx(1.2890625).epsilon(1e-6));
  // Round trip: sigma_c(ell(r_y)) / sigma_y0 == r_y.
  for (double ry : {0.5, 1.0, 1.5, 2.5}) {
    MaterialParams q = table1();
    q.Gc = 33.0;
    q.ell = length_scale_for_ductility(ry, q);
    CHECK(critical_stress_1d(q) / q.sigma_y0 == doctest::Approx(ry).epsilon(1e-12));
  }
}

TEST_CASE("homogeneous 1D response") {
  auto p = table1();  // Gc=5, ell=0.4: brittle, r_y < 1
  const auto brittle = homogeneous_1d_response(p);
  CHECK(brittle.sigma_u == doctest::Approx(513.0).epsilon(0.02));
  // No plastic deformation at the peak.
  for (const auto& pt : brittle.points)
    if (pt.strain <= brittle.strain_at_peak) CHECK(pt.eps_p_eq == doctest::Approx(0.0));

  // Ductile cases: same ell, Gc 80 vs 35 -> peaks close, elongation ordered.
  auto p80 = table1();
  p80.Gc = 80.0;
  auto p35 = table1();
  p35.Gc = 35.0;
  const auto c80 = homogeneous_1d_response(p80);
  const auto c35 = homogeneous_1d_response(p35);
  CHECK(c80.sigma_u > p80.sigma_y0);
  CHECK(c35.sigma_u > p35.sigma_y0);
  CHECK(std::abs(c80.sigma_u - c35.sigma_u) / c80.sigma_u < 0.15);
  CHECK(c35.strain_at_peak < c80.strain_at_peak);

  // Monotone strength in Gc down to the brittle limit.
  auto tiny = table1();
  tiny.Gc = 0.05;
  const auto ct = homogeneous_1d_response(tiny);
  CHECK(ct.sigma_u < brittle.sigma_u);
  CHECK(ct.sigma_u == doctest::Approx(critical_stress_1d(tiny)).epsilon(0.02));

  CHECK_THROWS_AS(homogeneous_1d_response(p, std::vector<double>{0.01, 0.005}),
                  std::domain_error);
}

TEST_CASE("uniaxial-stress point driver reproduces the scalar 1D model") {
  // The uniaxial stress state makes the tensorial driving energy collapse to
  // E eps_e^2 / 2 for any Poisson ratio, so the full tensor driver must track
  // the scalar solution in both brittle and ductile regimes.
  for (double gc : {5.0, 80.0}) {
    auto p = table1();
    p.Gc = gc;
    std::vector<double> grid;
    const double peak_est = gc > 40.0 ? 0.08 : 0.005;
    for (int i = 1; i <= 400; ++i) grid.push_back(peak_est * i / 400.0);
    const auto scalar = homogeneous_1d_response(p, grid);
    const auto tensor = uniaxial_stress_response(p, grid, true);
    REQUIRE(scalar.points.size() == tensor.points.size());
    for (size_t i = 0; i < scalar.points.size(); ++i) {
      CHECK(tensor.points[i].stress ==
            doctest::Approx(scalar.points[i].stress).epsilon(2e-4).scale(p.sigma_y0));
      CHECK(tensor.points[i].phi == doctest::Approx(scalar.points[i].phi).epsilon(5e-4));
    }
    CHECK(tensor.sigma_u == doctest::Approx(scalar.sigma_u).epsilon(1e-3));
  }
}

TEST_CASE("parameter validation") {
  MaterialParams p = table1();
  p.nu = 0.5;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p = table1();
  p.n = 1.0;
  CHECK_THROWS_AS(p.validate(), std::domain_error);
  p = table1();
  p.n = 0.0;  // perfectly plastic branch stays valid
  CHECK_NOTHROW(p.validate());
  HydrogenParams h;
  h.f_min = 0.0;
  CHECK_THROWS_AS(h.validate(), std::domain_error);
}
