#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "fadforge/campaigns.hpp"
#include "fadforge/fracture_post.hpp"
#include "fadforge/hydrogen.hpp"

namespace fadforge {

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  return dir.back() == '/' ? dir + name : dir + "/" + name;
}

template <class F>
void parallel_for(int jobs, int n, F&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(jobs, n); ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

std::string gc_label(double gc) {
  std::ostringstream s;
  s << "Gc=" << gc;
  return s.str();
}

// Radial deviation of a point from a FAL: positive when the point lies
// outside the envelope (1/SF - 1).
double radial_deviation(const AssessmentPoint& p, const FailureAssessmentLine& fal) {
  return 1.0 / safety_factor(p, fal) - 1.0;
}

struct SweepPoint {
  double Gc = 0.0;
  double load = 0.0;
  bool failed = false;
  std::string criterion;
  std::string error;
  AssessmentPoint point;
  LoadingPath path;
};

void append_point_series(FadBundle& bundle, const std::string& name,
                         const std::vector<SweepPoint>& pts) {
  FadBundle::PointSeries fails{name, {}, {}};
  for (const auto& pr : pts) {
    if (!pr.error.empty()) continue;
    fails.points.push_back(pr.point);
    fails.failed.push_back(pr.failed ? 1 : 0);
  }
  bundle.series.push_back(std::move(fails));
  for (const auto& pr : pts) {
    if (!pr.error.empty() || pr.path.points.empty()) continue;
    FadBundle::PointSeries path{"path_" + pr.point.label, pr.path.points,
                                std::vector<int>(pr.path.points.size(), 0)};
    bundle.series.push_back(std::move(path));
  }
}

std::vector<double> default_gc_sweep() {
  std::vector<double> gcs;
  for (int i = 0; i < 8; ++i) gcs.push_back(5.0 * std::pow(120.0 / 5.0, i / 7.0));
  return gcs;
}

}  // namespace

CampaignResult run_sent_fal_sweep(const RunConfig& cfg, const std::string& out_dir, int jobs) {
  ensure_directory(out_dir);
  CampaignResult out;
  const MaterialParams base = cfg.material();
  const double W = cfg.kv.get_double_or("sent.W", 5.0);
  const double L = cfg.kv.get_double_or("sent.L", 50.0);
  const double a0 = cfg.kv.get_double_or("sent.a0", 1.5);
  const double r_y = cfg.kv.get_double_or("sweep.r_y", 1.5);
  const std::vector<double> gcs =
      cfg.kv.has("sweep.Gc") ? cfg.kv.get_list("sweep.Gc") : default_gc_sweep();
  const SolverConfig scfg = cfg.solver();

  // Under the fixed-ductility rule sigma_u depends on Gc/ell only, which is
  // the same for every sweep point.
  MaterialParams probe = base;
  probe.Gc = gcs.front();
  probe.ell = length_scale_for_ductility(r_y, probe);
  const double sigma_u = ultimate_stress_1d(probe);
  const double lr_max = cutoff_lr_max(base.sigma_y0, sigma_u);
  const auto fal1 = build_fal(FalOption::opt1, base.E, base.sigma_y0, lr_max);
  const auto fal2 =
      build_fal(FalOption::opt2, base.E, base.sigma_y0, lr_max, power_law_ref_curve(base));
  const double Py = sent_yield_load(1.0, W, a0, base.sigma_y0);

  std::vector<SweepPoint> pts(gcs.size());
  parallel_for(jobs, int(gcs.size()), [&](int i) {
    SweepPoint& pr = pts[i];
    pr.Gc = gcs[i];
    try {
      SentSetup s;
      s.W = W;
      s.L = L;
      s.a0 = a0;
      s.mat = base;
      s.mat.Gc = gcs[i];
      s.mat.ell = length_scale_for_ductility(r_y, s.mat);
      s.solver = scfg;
      s.h_fine = cfg.kv.get_double_or("mesh.h_fine", 0.0);
      const auto oc = run_sent_to_failure(s);
      pr.load = oc.load;
      pr.failed = oc.failed;
      pr.criterion = oc.criterion;
      const double Kc = toughness_from_Gc(gcs[i], base.E, base.nu);
      pr.point = assessment_point(sent_sif(oc.load, 1.0, W, a0), Kc, oc.load, Py, gc_label(gcs[i]));
      for (const auto& rec : oc.result.records) {
        if (rec.reaction <= 0.0) continue;
        pr.path.points.push_back(
            assessment_point(sent_sif(rec.reaction, 1.0, W, a0), Kc, rec.reaction, Py));
      }
    } catch (const std::exception& ex) {
      pr.error = ex.what();
    }
  });

  FadBundle bundle;
  bundle.meta = {{"campaign", "sent-fal-sweep"}, {"Lr_max", fmt_g17(lr_max)},
                 {"sigma_u", fmt_g17(sigma_u)},  {"Py", fmt_g17(Py)},
                 {"normalization", "air"}};
  bundle.fals.push_back({"option1", fal1});
  bundle.fals.push_back({"option2", fal2});
  append_point_series(bundle, "failure_points", pts);
  const std::string fad_path = join_path(out_dir, "fad.csv");
  write_fad_bundle(bundle, fad_path);
  out.files.push_back(fad_path);

  out.summary.push_back({"campaign", "sent-fal-sweep"});
  out.summary.push_back({"sigma_u", fmt_g17(sigma_u)});
  out.summary.push_back({"sigma_u_over_sy0", fmt_g17(sigma_u / base.sigma_y0)});
  out.summary.push_back({"Lr_max", fmt_g17(lr_max)});
  out.summary.push_back({"Py", fmt_g17(Py)});
  double worst_dev2 = 0.0;
  for (const auto& pr : pts) {
    const std::string tag = "point." + gc_label(pr.Gc);
    if (!pr.error.empty()) {
      out.summary.push_back({tag + ".error", pr.error});
      continue;
    }
    const double dev1 = radial_deviation(pr.point, fal1);
    const double dev2 = radial_deviation(pr.point, fal2);
    out.summary.push_back({tag + ".load", fmt_g17(pr.load)});
    out.summary.push_back({tag + ".Lr", fmt_g17(pr.point.Lr)});
    out.summary.push_back({tag + ".Kr", fmt_g17(pr.point.Kr)});
    out.summary.push_back({tag + ".failed", pr.failed ? "true" : "false"});
    out.summary.push_back({tag + ".criterion", pr.criterion});
    out.summary.push_back({tag + ".dev_option1", fmt_g17(dev1)});
    out.summary.push_back({tag + ".dev_option2", fmt_g17(dev2)});
    if (pr.point.Lr >= 0.2 && pr.point.Lr <= 1.0)
      worst_dev2 = std::max(worst_dev2, std::abs(dev2));
  }
  out.summary.push_back({"max_abs_dev_option2_in_0.2_1.0", fmt_g17(worst_dev2)});

  if (cfg.kv.get_bool_or("sent.control_run", false)) {
    SentSetup s;
    s.W = W;
    s.L = L;
    s.a0 = a0;
    s.mat = base;
    s.mat.Gc = cfg.kv.get_double_or("sent.control_Gc", 2000.0);
    s.mat.ell = length_scale_for_ductility(r_y, s.mat);
    s.solver = scfg;
    const auto oc = run_sent_to_failure(s);
    const double ratio = oc.load / Py;
    out.summary.push_back({"control.saturation_ratio", fmt_g17(ratio)});
    out.summary.push_back({"control.sigma_u_over_sy0", fmt_g17(sigma_u / base.sigma_y0)});
    out.summary.push_back(
        {"control.rel_error", fmt_g17(std::abs(ratio / (sigma_u / base.sigma_y0) - 1.0))});
  }

  const std::string sum_path = join_path(out_dir, "summary.txt");
  write_summary(out.summary, sum_path);
  out.files.push_back(sum_path);
  return out;
}

CampaignResult run_sent_hydrogen_sweep(const RunConfig& cfg, const std::string& out_dir,
                                       int jobs) {
  ensure_directory(out_dir);
  CampaignResult out;
  const MaterialParams base = cfg.material();
  const HydrogenParams hyd = cfg.hydrogen();
  const double W = cfg.kv.get_double_or("sent.W", 5.0);
  const double L = cfg.kv.get_double_or("sent.L", 50.0);
  const double a0 = cfg.kv.get_double_or("sent.a0", 1.5);
  const double r_y = cfg.kv.get_double_or("sweep.r_y", 1.5);
  const double c_faces = cfg.kv.get_double_or("bc.hydrogen.faces", 0.17);
  const std::vector<double> gcs =
      cfg.kv.has("sweep.Gc") ? cfg.kv.get_list("sweep.Gc") : default_gc_sweep();
  const SolverConfig scfg = cfg.solver();

  MaterialParams probe = base;
  probe.Gc = gcs.front();
  probe.ell = length_scale_for_ductility(r_y, probe);
  const double sigma_u = ultimate_stress_1d(probe);
  const double lr_max = cutoff_lr_max(base.sigma_y0, sigma_u);
  const auto fal1 = build_fal(FalOption::opt1, base.E, base.sigma_y0, lr_max);
  const auto fal2 =
      build_fal(FalOption::opt2, base.E, base.sigma_y0, lr_max, power_law_ref_curve(base));
  const double Py = sent_yield_load(1.0, W, a0, base.sigma_y0);
  const double f_c = hydrogen_toughness_factor(c_faces, hyd);

  struct H2Point {
    SweepPoint air, h2_airnorm, h2_h2norm;
  };
  std::vector<H2Point> pts(gcs.size());
  parallel_for(jobs, int(gcs.size()), [&](int i) {
    H2Point& pr = pts[i];
    pr.air.Gc = pr.h2_airnorm.Gc = pr.h2_h2norm.Gc = gcs[i];
    SentSetup s;
    s.W = W;
    s.L = L;
    s.a0 = a0;
    s.mat = base;
    s.mat.Gc = gcs[i];
    s.mat.ell = length_scale_for_ductility(r_y, s.mat);
    s.solver = scfg;
    s.h_fine = cfg.kv.get_double_or("mesh.h_fine", 0.0);
    const double Kc_air = toughness_from_Gc(gcs[i], base.E, base.nu);
    const double Kc_h2 = toughness_from_Gc(f_c * gcs[i], base.E, base.nu);
    try {
      const auto air = run_sent_to_failure(s);
      pr.air.load = air.load;
      pr.air.failed = air.failed;
      pr.air.criterion = air.criterion;
      pr.air.point =
          assessment_point(sent_sif(air.load, 1.0, W, a0), Kc_air, air.load, Py, gc_label(gcs[i]));
    } catch (const std::exception& ex) {
      pr.air.error = ex.what();
    }
    try {
      SentSetup sh = s;
      sh.hydrogen = true;
      sh.hyd = hyd;
      sh.C_faces = c_faces;
      const auto h2 = run_sent_to_failure(sh);
      pr.h2_airnorm.load = pr.h2_h2norm.load = h2.load;
      pr.h2_airnorm.failed = pr.h2_h2norm.failed = h2.failed;
      pr.h2_airnorm.criterion = pr.h2_h2norm.criterion = h2.criterion;
      const double K = sent_sif(h2.load, 1.0, W, a0);
      pr.h2_airnorm.point = assessment_point(K, Kc_air, h2.load, Py, gc_label(gcs[i]));
      pr.h2_h2norm.point = assessment_point(K, Kc_h2, h2.load, Py, gc_label(gcs[i]));
      for (const auto& rec : h2.result.records) {
        if (rec.reaction <= 0.0) continue;
        pr.h2_h2norm.path.points.push_back(
            assessment_point(sent_sif(rec.reaction, 1.0, W, a0), Kc_h2, rec.reaction, Py));
      }
    } catch (const std::exception& ex) {
      pr.h2_airnorm.error = pr.h2_h2norm.error = ex.what();
    }
  });

  std::vector<SweepPoint> airs, h2a, h2h;
  for (auto& pr : pts) {
    airs.push_back(pr.air);
    h2a.push_back(pr.h2_airnorm);
    h2h.push_back(pr.h2_h2norm);
  }

  FadBundle ba;  // air-toughness normalization (air + hydrogen points)
  ba.meta = {{"campaign", "sent-h2-sweep"},
             {"normalization", "air-Kc"},
             {"Lr_max", fmt_g17(lr_max)},
             {"C_faces", fmt_g17(c_faces)}};
  ba.fals.push_back({"option1", fal1});
  ba.fals.push_back({"option2", fal2});
  append_point_series(ba, "air_failure_points", airs);
  append_point_series(ba, "h2_failure_points", h2a);
  const std::string pa = join_path(out_dir, "fad_air_norm.csv");
  write_fad_bundle(ba, pa);
  out.files.push_back(pa);

  FadBundle bh;  // hydrogen-degraded toughness normalization
  bh.meta = {{"campaign", "sent-h2-sweep"},
             {"normalization", "h2-Kc"},
             {"Lr_max", fmt_g17(lr_max)},
             {"f_C", fmt_g17(f_c)}};
  bh.fals.push_back({"option1", fal1});
  bh.fals.push_back({"option2", fal2});
  append_point_series(bh, "h2_failure_points", h2h);
  const std::string ph = join_path(out_dir, "fad_h2_norm.csv");
  write_fad_bundle(bh, ph);
  out.files.push_back(ph);

  out.summary.push_back({"campaign", "sent-h2-sweep"});
  out.summary.push_back({"f_C", fmt_g17(f_c)});
  out.summary.push_back({"sigma_u", fmt_g17(sigma_u)});
  double dip = 1e9;
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& pr = pts[i];
    const std::string tag = "point." + gc_label(gcs[i]);
    if (!pr.air.error.empty() || !pr.h2_airnorm.error.empty()) {
      out.summary.push_back(
          {tag + ".error", pr.air.error.empty() ? pr.h2_airnorm.error : pr.air.error});
      continue;
    }
    const double red = 1.0 - pr.h2_airnorm.load / pr.air.load;
    out.summary.push_back({tag + ".load_air", fmt_g17(pr.air.load)});
    out.summary.push_back({tag + ".load_h2", fmt_g17(pr.h2_airnorm.load)});
    out.summary.push_back({tag + ".reduction", fmt_g17(red)});
    out.summary.push_back({tag + ".Lr_air", fmt_g17(pr.air.point.Lr)});
    out.summary.push_back({tag + ".Kr_h2norm", fmt_g17(pr.h2_h2norm.point.Kr)});
    out.summary.push_back(
        {tag + ".dev_option2_h2norm", fmt_g17(radial_deviation(pr.h2_h2norm.point, fal2))});
    if (pr.h2_h2norm.point.Lr > 0.6 && pr.h2_h2norm.point.Lr < 0.9)
      dip = std::min(dip, radial_deviation(pr.h2_h2norm.point, fal2));
  }
  out.summary.push_back({"transition_dip_margin_vs_option2", dip < 1e9 ? fmt_g17(dip) : "n/a"});
  const std::string sp = join_path(out_dir, "summary.txt");
  write_summary(out.summary, sp);
  out.files.push_back(sp);
  return out;
}

CampaignResult run_transition_flaw_sweep(const RunConfig& cfg, const std::string& out_dir,
                                         int jobs) {
  ensure_directory(out_dir);
  CampaignResult out;
  MaterialParams mat = cfg.material();
  const double W = cfg.kv.get_double_or("sent.W", 5.0);
  const double L = cfg.kv.get_double_or("sent.L", 50.0);
  const double r_y = cfg.kv.get_double_or("sweep.r_y", 1.5);
  mat.ell = length_scale_for_ductility(r_y, mat);
  std::vector<double> ratios;
  if (cfg.kv.has("sweep.a0_over_W"))
    ratios = cfg.kv.get_list("sweep.a0_over_W");
  else
    ratios = {0.004, 0.012, 0.04, 0.12, 0.3};
  const SolverConfig scfg = cfg.solver();

  const double sigma_c = critical_stress_1d(mat);
  const double sigma_u = ultimate_stress_1d(mat);
  const double Kc = toughness_from_Gc(mat.Gc, mat.E, mat.nu);

  struct FlawPoint {
    double a0 = 0.0, sigma_f = 0.0, griffith = 0.0;
    bool failed = false;
    std::string error;
  };
  std::vector<FlawPoint> pts(ratios.size());
  parallel_for(jobs, int(ratios.size()), [&](int i) {
    FlawPoint& pr = pts[i];
    pr.a0 = ratios[i] * W;
    try {
      SentSetup s;
      s.W = W;
      s.L = L;
      s.a0 = pr.a0;
      s.mat = mat;
      s.solver = scfg;
      // Keep at least two elements along very short seams.
      s.h_fine = std::min(mat.ell / 4.0, pr.a0 / 2.0);
      const auto oc = run_sent_to_failure(s);
      pr.sigma_f = oc.load / W;  // unit thickness
      pr.failed = oc.failed;
      pr.griffith = Kc / (std::sqrt(W) * sent_geometry_factor(ratios[i]));
    } catch (const std::exception& ex) {
      pr.error = ex.what();
    }
  });

  const std::string flaw_path = join_path(out_dir, "flaw.csv");
  {
    std::ostringstream os;
    os << "# " << kFormatVersion << " flaw-sweep\n";
    os << "a0,a0_over_W,sigma_f,sigma_f_over_sigma_c,sigma_griffith,sigma_collapse,failed\n";
    for (size_t i = 0; i < pts.size(); ++i) {
      const auto& pr = pts[i];
      if (!pr.error.empty()) continue;
      os << fmt_g17(pr.a0) << ',' << fmt_g17(ratios[i]) << ',' << fmt_g17(pr.sigma_f) << ','
         << fmt_g17(pr.sigma_f / sigma_c) << ',' << fmt_g17(pr.griffith) << ','
         << fmt_g17(sigma_u) << ',' << (pr.failed ? 1 : 0) << '\n';
    }
    std::ofstream f(flaw_path);
    f << os.str();
  }
  out.files.push_back(flaw_path);

  const std::string inter_path = join_path(out_dir, "interaction.csv");
  {
    std::ostringstream os;
    os << "# " << kFormatVersion << " interaction-diagram\n";
    os << "a0,Lc,Kr\n";
    for (size_t i = 0; i < pts.size(); ++i) {
      const auto& pr = pts[i];
      if (!pr.error.empty()) continue;
      const double P = pr.sigma_f * W;
      os << fmt_g17(pr.a0) << ',' << fmt_g17(pr.sigma_f / sigma_u) << ','
         << fmt_g17(sent_sif(P, 1.0, W, pr.a0) / Kc) << '\n';
    }
    std::ofstream f(inter_path);
    f << os.str();
  }
  out.files.push_back(inter_path);

  out.summary.push_back({"campaign", "flaw-sweep"});
  out.summary.push_back({"sigma_c", fmt_g17(sigma_c)});
  out.summary.push_back({"sigma_u", fmt_g17(sigma_u)});
  out.summary.push_back({"Kc", fmt_g17(Kc)});
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& pr = pts[i];
    std::ostringstream tag;
    tag << "point.a0_over_W=" << ratios[i];
    if (!pr.error.empty()) {
      out.summary.push_back({tag.str() + ".error", pr.error});
      continue;
    }
    out.summary.push_back({tag.str() + ".sigma_f", fmt_g17(pr.sigma_f)});
    out.summary.push_back({tag.str() + ".vs_collapse", fmt_g17(pr.sigma_f / sigma_u)});
    out.summary.push_back({tag.str() + ".vs_griffith", fmt_g17(pr.sigma_f / pr.griffith)});
  }
  const std::string sp = join_path(out_dir, "summary.txt");
  write_summary(out.summary, sp);
  out.files.push_back(sp);
  return out;
}

CampaignResult run_rcurve_campaign(const RunConfig& cfg, const std::string& out_dir) {
  ensure_directory(out_dir);
  CampaignResult out;
  RCurveSetup s;
  s.mat = cfg.material();
  s.R = cfg.kv.get_double_or("rcurve.R", 60.0);
  s.K_max = cfg.kv.get_double_or("rcurve.K_max", 0.0);
  s.da_max = cfg.kv.get_double_or("rcurve.da_max", 0.0);
  s.h_fine = cfg.kv.get_double_or("mesh.h_fine", 0.0);
  s.solver = cfg.solver();
  const auto curve = boundary_layer_rcurve(s);

  const std::string path = join_path(out_dir, "rcurve.csv");
  {
    std::ostringstream os;
    os << "# " << kFormatVersion << " rcurve\n";
    os << "K,J,da\n";
    for (const auto& pt : curve)
      os << fmt_g17(pt.K) << ',' << fmt_g17(pt.J) << ',' << fmt_g17(pt.da) << '\n';
    std::ofstream f(path);
    f << os.str();
  }
  out.files.push_back(path);

  // Initiation toughness: J interpolated where the front first moves ell/2.
  double j_init = 0.0;
  const double da0 = 0.5 * s.mat.ell;
  for (size_t i = 1; i < curve.size(); ++i) {
    if (curve[i].da >= da0 && curve[i - 1].da < da0) {
      const double t = (da0 - curve[i - 1].da) / (curve[i].da - curve[i - 1].da);
      j_init = curve[i - 1].J + t * (curve[i].J - curve[i - 1].J);
      break;
    }
  }
  double slope = 0.0;
  {
    // Secant slope over [ell, 3 ell] of crack extension.
    double j1 = 0.0, j3 = 0.0;
    for (size_t i = 1; i < curve.size(); ++i) {
      if (j1 == 0.0 && curve[i].da >= s.mat.ell) j1 = curve[i].J;
      if (j3 == 0.0 && curve[i].da >= 3.0 * s.mat.ell) j3 = curve[i].J;
    }
    if (j1 > 0.0 && j3 > 0.0) slope = (j3 - j1) / (2.0 * s.mat.ell);
  }
  out.summary.push_back({"campaign", "rcurve"});
  out.summary.push_back({"Gc", fmt_g17(s.mat.Gc)});
  out.summary.push_back({"J_init", fmt_g17(j_init)});
  out.summary.push_back({"J_init_over_Gc", j_init > 0.0 ? fmt_g17(j_init / s.mat.Gc) : "n/a"});
  out.summary.push_back({"dJ_dda", fmt_g17(slope)});
  const std::string sp = join_path(out_dir, "summary.txt");
  write_summary(out.summary, sp);
  out.files.push_back(sp);
  return out;
}

CampaignResult run_onedim(const RunConfig& cfg, const std::string& out_dir) {
  ensure_directory(out_dir);
  CampaignResult out;
  const MaterialParams mat = cfg.material();
  const auto curve = homogeneous_1d_response(mat);
  const std::string path = join_path(out_dir, "onedim.csv");
  {
    std::ostringstream os;
    os << "# " << kFormatVersion << " onedim\n";
    os << "strain,stress,phi,eps_p_eq\n";
    for (const auto& pt : curve.points)
      os << fmt_g17(pt.strain) << ',' << fmt_g17(pt.stress) << ',' << fmt_g17(pt.phi) << ','
         << fmt_g17(pt.eps_p_eq) << '\n';
    std::ofstream f(path);
    f << os.str();
  }
  out.files.push_back(path);
  out.summary.push_back({"campaign", "onedim"});
  out.summary.push_back({"sigma_u", fmt_g17(curve.sigma_u)});
  out.summary.push_back({"strain_at_peak", fmt_g17(curve.strain_at_peak)});
  out.summary.push_back({"sigma_c", fmt_g17(critical_stress_1d(mat))});
  out.summary.push_back({"r_y", fmt_g17(critical_stress_1d(mat) / mat.sigma_y0)});
  const std::string sp = join_path(out_dir, "summary.txt");
  write_summary(out.summary, sp);
  out.files.push_back(sp);
  return out;
}

namespace {

struct PipeDefectCase {
  std::string name;
  double length;
};

std::vector<PipeDefectCase> parse_defect_list(const std::string& text) {
  std::vector<PipeDefectCase> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("pipe.defects: expected NAME:LENGTH, got '" + item + "'");
    out.push_back({item.substr(0, colon), std::stod(item.substr(colon + 1))});
  }
  if (out.empty()) throw std::invalid_argument("pipe.defects: empty list");
  return out;
}

struct PipeCaseResult {
  std::string label;
  double k_unit = 0.0;  // equivalent SIF per unit pressure
  double theta_star = 0.0;
  double k2_over_k1 = 0.0;
  double p_y = 0.0;
  double p_f = 0.0;
  bool failed = false;
  std::string criterion;
  std::string error;
  double residual_correction = 0.0;
  std::vector<std::pair<double, double>> pressure_k;  // (p, K) along the path
};

}  // namespace

CampaignResult run_pipeline_campaign(const RunConfig& cfg, const std::string& out_dir, int jobs) {
  ensure_directory(out_dir);
  CampaignResult out;
  const MaterialParams base = cfg.material();
  const MaterialParams weld =
      cfg.kv.has("weld_material.sigma_y0") || cfg.kv.has("weld_material.Gc")
          ? cfg.material("weld_material.")
          : base;
  const HydrogenParams base_h = cfg.hydrogen();
  const HydrogenParams weld_h = cfg.kv.has("weld_hydrogen.f_min")
                                    ? cfg.hydrogen("weld_hydrogen.")
                                    : base_h;
  const bool hydrogen = cfg.kv.get_bool_or("hydrogen.enable", false);
  const bool synthetic = cfg.kv.get_bool_or("field.synthetic", false);
  const double OD = cfg.kv.get_double_or("pipe.OD", 762.0);
  const double t = cfg.kv.get_double_or("pipe.t", 12.7);
  const double sector = cfg.kv.get_double_or("pipe.sector_deg", 30.0) * std::numbers::pi / 180.0;
  const double r_mid = 0.5 * OD - 0.5 * t;
  const auto cases = parse_defect_list(cfg.kv.get_or("pipe.defects", "A:2,B:2,C:2,C:4,D:4,E:2"));
  const SolverConfig scfg = cfg.solver();

  const double sigma_u = ultimate_stress_1d(base);
  const double lr_max = cutoff_lr_max(base.sigma_y0, sigma_u);
  const auto fal1 = build_fal(FalOption::opt1, base.E, base.sigma_y0, lr_max);
  const auto fal2 =
      build_fal(FalOption::opt2, base.E, base.sigma_y0, lr_max, power_law_ref_curve(base));

  std::vector<PipeCaseResult> results(cases.size());
  parallel_for(jobs, int(cases.size()), [&](int ci) {
    PipeCaseResult& r = results[ci];
    std::ostringstream lbl;
    lbl << cases[ci].name << cases[ci].length << "mm";
    r.label = lbl.str();
    try {
      PipeMeshOptions po;
      po.OD = OD;
      po.t = t;
      po.sector = sector;
      po.defect = pipe_defect_preset(cases[ci].name, cases[ci].length);
      po.h_fine = cfg.kv.get_double_or("mesh.h_fine", base.ell / 4.0);
      Mesh mesh = generate_pipe_section_mesh(po);

      auto probe_fn = [t, r_mid](const Simulation& sim) {
        return thin_wall_pressure(mean_hoop_stress(sim, "nominal_section"), t, r_mid);
      };
      auto setup_frames = [&](Simulation& sim, double u_r_scale, bool drive) {
        const Mesh& m = sim.mesh();
        for (const char* cut : {"cut0", "cut1"})
          for (int n : m.nset(cut)) {
            sim.set_node_frame(n, std::atan2(m.nodes[n].y, m.nodes[n].x));
            sim.add_dirichlet(n, 1, 0.0);  // tangential roller (symmetry cut)
          }
        if (drive)
          for (int n : m.nset("inner")) {
            sim.set_node_frame(n, std::atan2(m.nodes[n].y, m.nodes[n].x));
            sim.add_dirichlet(n, 0, u_r_scale, true);  // radial displacement drive
          }
      };

      // (1) Elastic SIF per unit pressure via the interaction integral.
      const auto tip_info = crack_tip_info(mesh);
      {
        MaterialParams elastic = base;
        elastic.sigma_y0 = 1e7;
        SolverConfig ecfg = scfg;
        ecfg.enable_phase_field = false;
        Simulation sim(mesh, elastic, ecfg);
        setup_frames(sim, 0.0, false);
        sim.add_normal_pressure("inner", 1.0);
        const auto rep = sim.solve_displacement(1.0);
        if (!rep.converged) throw std::runtime_error("pipe elastic solve failed");
        const std::vector<std::pair<int, int>> domains = {{2, 4}, {2, 6}, {2, 8}};
        double best = -1.0;
        for (const char* ts : {"crack_tip", "crack_tip2"}) {
          if (!sim.mesh().has_nset(ts)) continue;
          const auto ti = crack_tip_info(sim.mesh(), "crack", ts);
          const auto kk = interaction_integral_k(sim, ti, domains);
          const auto eq = mixed_mode_keq(std::max(kk.K_I, 0.0), kk.K_II);
          if (eq.k_eq > best) {
            best = eq.k_eq;
            r.theta_star = eq.theta_star;
            r.k2_over_k1 = kk.K_I != 0.0 ? kk.K_II / kk.K_I : 0.0;
          }
        }
        if (best <= 0.0) throw std::runtime_error("pipe elastic K extraction failed");
        r.k_unit = best;
      }

      // (2) Limit pressure from a perfectly plastic analysis (homogeneous
      // base properties, as used for the FAD normalization).
      {
        SolverConfig lcfg = scfg;
        lcfg.n_steps = std::max(60, scfg.n_steps / 2);
        Simulation sim(mesh, base, lcfg);
        setup_frames(sim, 12.0 * base.sigma_y0 / base.E * r_mid, true);
        sim.set_probe(probe_fn);
        (void)sim.run_limit_load();  // leaves the state at the plateau
        r.p_y = probe_fn(sim);
        if (r.p_y <= 0.0) throw std::runtime_error("pipe limit pressure is non-positive");
      }

      // (3) Coupled failure run.
      double u_r_max = cfg.kv.get_double_or("load.u_r", 6.0 * sigma_u / base.E * r_mid);
      for (int attempt = 0; attempt < 3; ++attempt) {
        Simulation sim(mesh, base, scfg);
        setup_frames(sim, u_r_max, true);
        sim.set_probe(probe_fn);
        sim.set_crack_tip(tip_info.x, tip_info.y);
        if (synthetic) {
          const auto field = make_synthetic_weld_field(sim.mesh(), cfg);
          r.residual_correction =
              apply_property_field(sim, field, base, weld, base_h, weld_h);
        }
        if (hydrogen) {
          sim.set_hydrogen(base_h);
          sim.config().enable_hydrogen = true;
          if (synthetic) {
            const auto field = make_synthetic_weld_field(sim.mesh(), cfg);
            for (const auto& [e, xb] : field.xb)
              sim.set_hydrogen_degradation(
                  e, base_h.f_min + (weld_h.f_min - base_h.f_min) * xb,
                  base_h.q1 + (weld_h.q1 - base_h.q1) * xb,
                  base_h.q2 + (weld_h.q2 - base_h.q2) * xb);
          }
          const double S = base_h.S;
          ConcentrationBC inner;
          inner.nodes = sim.mesh().nset("inner");
          inner.value = [S, probe_fn](const Simulation& s) {
            return sievert_concentration(std::max(probe_fn(s), 0.0), S);
          };
          sim.add_concentration_bc(std::move(inner));
          ConcentrationBC outer;
          outer.nodes = sim.mesh().nset("outer_surface");
          outer.value = [](const Simulation&) { return 0.0; };
          sim.add_concentration_bc(std::move(outer));
        }
        const auto res = sim.run();
        if (res.aborted) throw std::runtime_error("pipe run aborted: " + res.abort_reason);
        if (res.failure.failed) {
          r.failed = true;
          r.p_f = res.failure.probe;
          r.criterion = res.failure.criterion;
        } else {
          r.failed = false;
          double peak = 0.0;
          for (const auto& rec : res.records) peak = std::max(peak, rec.probe);
          r.p_f = peak;
          r.criterion = "none";
        }
        for (const auto& rec : res.records)
          if (rec.probe > 0.0) r.pressure_k.push_back({rec.probe, r.k_unit * rec.probe});
        if (r.failed) break;
        const auto& last = res.records.back();
        const auto& mid = res.records[res.records.size() / 2];
        if (last.reaction < 1.02 * mid.reaction) break;  // saturated
        u_r_max *= 2.0;
        r.pressure_k.clear();
      }
    } catch (const std::exception& ex) {
      r.error = ex.what();
    }
  });

  // Assessment in the requested normalization modes.
  std::vector<std::string> modes;
  if (hydrogen) {
    modes = {"h2_base", "h2_weld"};
  } else {
    modes = {"air_base"};
  }
  auto kc_of = [&](const std::string& mode, double p) {
    if (mode == "air_base") return toughness_from_Gc(base.Gc, base.E, base.nu);
    const double c = sievert_concentration(std::max(p, 0.0), base_h.S);
    if (mode == "h2_base")
      return toughness_from_Gc(hydrogen_toughness_factor(c, base_h) * base.Gc, base.E, base.nu);
    return toughness_from_Gc(hydrogen_toughness_factor(c, weld_h) * weld.Gc, weld.E, weld.nu);
  };

  out.summary.push_back({"campaign", "pipe"});
  out.summary.push_back({"hydrogen", hydrogen ? "true" : "false"});
  out.summary.push_back({"field", synthetic ? "synthetic" : "homogeneous"});
  out.summary.push_back({"sigma_u_base", fmt_g17(sigma_u)});
  out.summary.push_back({"Lr_max", fmt_g17(lr_max)});

  for (const auto& mode : modes) {
    FadBundle bundle;
    bundle.meta = {{"campaign", "pipe"}, {"normalization", mode}, {"Lr_max", fmt_g17(lr_max)}};
    bundle.fals.push_back({"option1", fal1});
    bundle.fals.push_back({"option2", fal2});
    FadBundle::PointSeries fails{"failure_points", {}, {}};
    double sf_required_1 = 1.0, sf_required_2 = 1.0;
    for (const auto& r : results) {
      if (!r.error.empty()) continue;
      const auto pt = assessment_point(r.k_unit * r.p_f, kc_of(mode, r.p_f), r.p_f, r.p_y, r.label);
      fails.points.push_back(pt);
      fails.failed.push_back(r.failed ? 1 : 0);
      const double sf1 = safety_factor(pt, fal1);
      const double sf2 = safety_factor(pt, fal2);
      sf_required_1 = std::max(sf_required_1, sf1);
      sf_required_2 = std::max(sf_required_2, sf2);
      out.summary.push_back({"point." + mode + "." + r.label + ".Lr", fmt_g17(pt.Lr)});
      out.summary.push_back({"point." + mode + "." + r.label + ".Kr", fmt_g17(pt.Kr)});
      out.summary.push_back({"point." + mode + "." + r.label + ".SF_option1", fmt_g17(sf1)});
      out.summary.push_back({"point." + mode + "." + r.label + ".SF_option2", fmt_g17(sf2)});
    }
    bundle.series.push_back(std::move(fails));
    for (const auto& r : results) {
      if (!r.error.empty() || r.pressure_k.empty()) continue;
      FadBundle::PointSeries path{"path_" + r.label, {}, {}};
      for (const auto& [p, K] : r.pressure_k) {
        path.points.push_back(assessment_point(K, kc_of(mode, p), p, r.p_y, r.label));
        path.failed.push_back(0);
      }
      bundle.series.push_back(std::move(path));
    }
    const std::string path = join_path(out_dir, "fad_" + mode + ".csv");
    write_fad_bundle(bundle, path);
    out.files.push_back(path);
    out.summary.push_back({"sf_required_option1." + mode, fmt_g17(sf_required_1)});
    out.summary.push_back({"sf_required_option2." + mode, fmt_g17(sf_required_2)});
  }

  for (const auto& r : results) {
    const std::string tag = "defect." + r.label;
    if (!r.error.empty()) {
      out.summary.push_back({tag + ".error", r.error});
      continue;
    }
    out.summary.push_back({tag + ".K_per_pressure", fmt_g17(r.k_unit)});
    out.summary.push_back({tag + ".KII_over_KI", fmt_g17(r.k2_over_k1)});
    out.summary.push_back({tag + ".kink_angle_deg", fmt_g17(r.theta_star * 180.0 / std::numbers::pi)});
    out.summary.push_back({tag + ".p_y", fmt_g17(r.p_y)});
    out.summary.push_back({tag + ".failure_pressure", fmt_g17(r.p_f)});
    out.summary.push_back({tag + ".failed", r.failed ? "true" : "false"});
    out.summary.push_back({tag + ".criterion", r.criterion});
    if (synthetic)
      out.summary.push_back({tag + ".residual_correction", fmt_g17(r.residual_correction)});
  }

  const std::string sp = join_path(out_dir, "summary.txt");
  write_summary(out.summary, sp);
  out.files.push_back(sp);
  return out;
}

namespace {

std::string resolve_out_dir(std::string dir) {
  if (dir.empty()) dir = "out";
  if (dir.front() != '/') {
    if (const char* root = std::getenv("FADFORGE_OUT_ROOT"))
      return std::string(root) + "/" + dir;
  }
  return dir;
}

int run_config_campaign(const std::string& config_path, const std::string& out_dir, int jobs,
                        CampaignResult (*driver)(const RunConfig&, const std::string&, int)) {
  const RunConfig cfg = RunConfig::load(config_path);
  const std::string dir = resolve_out_dir(out_dir);
  const auto result = driver(cfg, dir, jobs);
  cfg.kv.save(dir + "/config_used.cfg", "config");
  for (const auto& f : result.files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

}  // namespace

int cli(int argc, const char* const* argv) {
  CLI::App app{"failure assessment diagrams and coupled fracture simulations"};
  app.require_subcommand(1);

  // --- fal ---
  auto* fal_cmd = app.add_subcommand("fal", "write a standard failure assessment line");
  int fal_option = 1;
  double fal_E = 200000.0, fal_sy0 = 800.0, fal_n = 0.1, fal_su = 0.0;
  int fal_samples = 512;
  std::string fal_out = "fal.csv";
  fal_cmd->add_option("--option", fal_option, "FAL option (1 or 2)")->check(CLI::Range(1, 2));
  fal_cmd->add_option("--E", fal_E, "Young's modulus [MPa]");
  fal_cmd->add_option("--sy0", fal_sy0, "initial yield stress [MPa]");
  fal_cmd->add_option("--n", fal_n, "hardening exponent (option 2 reference curve)");
  fal_cmd->add_option("--su", fal_su, "ultimate strength for the cutoff (default 1.3 sy0)");
  fal_cmd->add_option("--samples", fal_samples, "number of Lr samples");
  fal_cmd->add_option("--out", fal_out, "output CSV path");

  // --- assess ---
  auto* as_cmd = app.add_subcommand("assess", "place an assessment point and compute its safety factor");
  double as_K = 0.0, as_Kc = 0.0, as_P = 0.0, as_Py = 0.0;
  double as_E = 200000.0, as_sy0 = 800.0, as_n = 0.1, as_su = 0.0;
  int as_option = 1;
  as_cmd->add_option("--K", as_K, "applied SIF [MPa sqrt(mm)]")->required();
  as_cmd->add_option("--Kc", as_Kc, "toughness [MPa sqrt(mm)]")->required();
  as_cmd->add_option("--P", as_P, "applied load")->required();
  as_cmd->add_option("--Py", as_Py, "yield load")->required();
  as_cmd->add_option("--option", as_option, "FAL option (1 or 2)")->check(CLI::Range(1, 2));
  as_cmd->add_option("--E", as_E, "Young's modulus [MPa]");
  as_cmd->add_option("--sy0", as_sy0, "initial yield stress [MPa]");
  as_cmd->add_option("--n", as_n, "hardening exponent");
  as_cmd->add_option("--su", as_su, "ultimate strength for the cutoff (default 1.3 sy0)");

  // --- onedim ---
  auto* od_cmd = app.add_subcommand("onedim", "homogeneous 1D stress-strain response");
  double od_E = 200000.0, od_nu = 0.3, od_sy0 = 800.0, od_n = 0.1, od_Gc = 5.0, od_ell = 0.4,
         od_beta = 0.1;
  std::string od_out = "out/onedim";
  od_cmd->add_option("--E", od_E, "Young's modulus [MPa]");
  od_cmd->add_option("--nu", od_nu, "Poisson ratio");
  od_cmd->add_option("--sy0", od_sy0, "initial yield stress [MPa]");
  od_cmd->add_option("--n", od_n, "hardening exponent");
  od_cmd->add_option("--Gc", od_Gc, "critical energy release rate [N/mm]");
  od_cmd->add_option("--ell", od_ell, "phase-field length scale [mm]");
  od_cmd->add_option("--beta", od_beta, "plastic-work fraction");
  od_cmd->add_option("--out", od_out, "output directory");

  // --- config-driven campaigns ---
  struct Sub {
    CLI::App* cmd;
    std::string config;
    std::string out;
    int jobs = 1;
    CampaignResult (*driver)(const RunConfig&, const std::string&, int);
  };
  auto add_campaign = [&](const char* name, const char* help,
                          CampaignResult (*driver)(const RunConfig&, const std::string&, int)) {
    Sub s;
    s.cmd = app.add_subcommand(name, help);
    s.driver = driver;
    return s;
  };
  Sub sent = add_campaign("sent-sweep", "virtual FAL sweep for the SENT specimen",
                          &run_sent_fal_sweep);
  Sub sent_h2 = add_campaign("sent-h2-sweep", "SENT sweep in a hydrogen environment",
                             &run_sent_hydrogen_sweep);
  Sub flaw = add_campaign("flaw-sweep", "transition flaw size sweep",
                          &run_transition_flaw_sweep);
  Sub pipe = add_campaign("pipe", "pipeline weld defect campaign", &run_pipeline_campaign);
  for (Sub* s : {&sent, &sent_h2, &flaw, &pipe}) {
    s->cmd->add_option("--config", s->config, "run configuration file")->required();
    s->cmd->add_option("--out", s->out, "output directory");
    s->cmd->add_option("--jobs", s->jobs, "parallel simulations");
  }
  auto* rc_cmd = app.add_subcommand("rcurve", "boundary-layer J-resistance curve");
  std::string rc_config, rc_out;
  rc_cmd->add_option("--config", rc_config, "run configuration file")->required();
  rc_cmd->add_option("--out", rc_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*fal_cmd) {
      const double su = fal_su > 0.0 ? fal_su : 1.3 * fal_sy0;
      const double lr_max = cutoff_lr_max(fal_sy0, su);
      MaterialParams mat;
      mat.E = fal_E;
      mat.sigma_y0 = fal_sy0;
      mat.n = fal_n;
      FailureAssessmentLine fal =
          fal_option == 1
              ? build_fal(FalOption::opt1, fal_E, fal_sy0, lr_max, {}, fal_samples)
              : build_fal(FalOption::opt2, fal_E, fal_sy0, lr_max, power_law_ref_curve(mat),
                          fal_samples);
      FadBundle bundle;
      bundle.meta = {{"campaign", "fal"}};
      bundle.fals.push_back({"option" + std::to_string(fal_option), fal});
      write_fad_bundle(bundle, fal_out);
      std::printf("wrote %s\n", fal_out.c_str());
      return 0;
    }
    if (*as_cmd) {
      const double su = as_su > 0.0 ? as_su : 1.3 * as_sy0;
      const double lr_max = cutoff_lr_max(as_sy0, su);
      MaterialParams mat;
      mat.E = as_E;
      mat.sigma_y0 = as_sy0;
      mat.n = as_n;
      const auto fal =
          as_option == 1
              ? build_fal(FalOption::opt1, as_E, as_sy0, lr_max)
              : build_fal(FalOption::opt2, as_E, as_sy0, lr_max, power_law_ref_curve(mat));
      const auto pt = assessment_point(as_K, as_Kc, as_P, as_Py);
      const double sf = safety_factor(pt, fal);
      std::printf("Lr = %s\nKr = %s\nSF = %s\n%s\n", fmt_g17(pt.Lr).c_str(),
                  fmt_g17(pt.Kr).c_str(), fmt_g17(sf).c_str(),
                  sf >= 1.0 ? "inside the FAL (safe)" : "outside the FAL (unsafe)");
      return 0;
    }
    if (*od_cmd) {
      RunConfig cfg;
      cfg.kv.set_double("material.E", od_E);
      cfg.kv.set_double("material.nu", od_nu);
      cfg.kv.set_double("material.sigma_y0", od_sy0);
      cfg.kv.set_double("material.n", od_n);
      cfg.kv.set_double("material.Gc", od_Gc);
      cfg.kv.set_double("material.ell", od_ell);
      cfg.kv.set_double("material.beta", od_beta);
      const std::string dir = resolve_out_dir(od_out);
      const auto result = run_onedim(cfg, dir);
      for (const auto& f : result.files) std::printf("wrote %s\n", f.c_str());
      for (const auto& [k, v] : result.summary)
        if (k == "sigma_u") std::printf("sigma_u = %s MPa\n", v.c_str());
      return 0;
    }
    if (*rc_cmd) {
      const RunConfig cfg = RunConfig::load(rc_config);
      const std::string dir = resolve_out_dir(rc_out.empty() ? "out/rcurve" : rc_out);
      const auto result = run_rcurve_campaign(cfg, dir);
      cfg.kv.save(dir + "/config_used.cfg", "config");
      for (const auto& f : result.files) std::printf("wrote %s\n", f.c_str());
      return 0;
    }
    for (Sub* s : {&sent, &sent_h2, &flaw, &pipe})
      if (*s->cmd)
        return run_config_campaign(s->config,
                                   s->out.empty() ? std::string("out/") + s->cmd->get_name()
                                                  : s->out,
                                   s->jobs, s->driver);
    return 2;
  } catch (const std::invalid_argument& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  } catch (const std::domain_error& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "solver error: %s\n", ex.what());
    return 3;
  }
}

}  // namespace fadforge
