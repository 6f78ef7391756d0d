#include "fadforge/fad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fadforge {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// Fritsch-Carlson monotone cubic slopes for tabulated (x, y).
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  std::vector<double> d(n, 0.0), h(n - 1), delta(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  return d;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& d, double xq) {
  if (xq <= x.front()) return y.front();
  if (xq >= x.back()) return y.back();
  size_t i = std::upper_bound(x.begin(), x.end(), xq) - x.begin() - 1;
  const double h = x[i + 1] - x[i];
  const double t = (xq - x[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
}

}  // namespace

RefCurve power_law_ref_curve(const MaterialParams& p) {
  const double E = p.E, sy = p.sigma_y0, n = p.n;
  return [E, sy, n](double sigma) {
    require(sigma >= 0.0, "ref_curve: sigma must be non-negative");
    double eps = sigma / E;
    if (sigma > sy && n > 0.0) eps += (sy / E) * (std::pow(sigma / sy, 1.0 / n) - 1.0);
    return eps;
  };
}

RefCurve RambergOsgoodFit::curve(double E, double sigma_y0) const {
  const double a = alpha, mm = m;
  return [=](double sigma) {
    return sigma / E + a * (sigma_y0 / E) * std::pow(sigma / sigma_y0, mm);
  };
}

RambergOsgoodFit fit_ramberg_osgood(const std::vector<std::pair<double, double>>& stress_strain,
                                    double E, double sigma_y0) {
  // Linear regression of log(eps_p) on log(sigma/sigma_y0).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (const auto& [sig, eps] : stress_strain) {
    const double eps_p = eps - sig / E;
    if (eps_p <= 1e-12 || sig <= 0.0) continue;
    const double lx = std::log(sig / sigma_y0);
    const double ly = std::log(eps_p * E / sigma_y0);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  require(count >= 2, "fit_ramberg_osgood: need at least two plastic samples");
  const double denom = count * sxx - sx * sx;
  require(std::abs(denom) > 1e-14, "fit_ramberg_osgood: degenerate sample spread");
  RambergOsgoodFit fit;
  fit.m = (count * sxy - sx * sy) / denom;
  fit.alpha = std::exp((sy - fit.m * sx) / count);
  return fit;
}

double fal_option1_mu(double E, double sigma_y0) {
  return std::min(0.001 * E / sigma_y0, 0.6);
}

double fal_option1(double Lr, double E, double sigma_y0) {
  require(Lr >= 0.0, "fal_option1: Lr must be non-negative");
  const double mu = fal_option1_mu(E, sigma_y0);
  const double lr2 = Lr * Lr;
  return std::pow(1.0 + 0.5 * lr2, -0.5) * (0.3 + 0.7 * std::exp(-mu * lr2 * lr2 * lr2));
}

double fal_option2(double Lr, const RefCurve& ref, double E, double sigma_y0) {
  require(Lr >= 0.0, "fal_option2: Lr must be non-negative");
  if (Lr == 0.0) return 1.0;
  const double sigma_ref = Lr * sigma_y0;
  const double eps_ref = ref(sigma_ref);
  const double a = E * eps_ref / sigma_ref;
  const double b = Lr * Lr * sigma_ref / (2.0 * E * eps_ref);
  return std::pow(a + b, -0.5);
}

double fal_option3(double J_ep, double J_e) {
  require(J_e > 0.0, "fal_option3: J_e must be positive");
  if (J_ep < J_e) throw std::domain_error("fal_option3: elastic-plastic J below elastic J");
  return std::sqrt(J_e / J_ep);
}

double cutoff_lr_max(double sigma_y0, double sigma_u) {
  if (sigma_u < sigma_y0) throw std::domain_error("cutoff_lr_max: sigma_u below sigma_y0");
  return (sigma_y0 + sigma_u) / (2.0 * sigma_y0);
}

double sent_geometry_factor(double a_over_W) {
  require(a_over_W > 0.0 && a_over_W < 1.0, "sent_geometry_factor: a/W out of (0, 1)");
  if (a_over_W > 0.95)
    throw std::domain_error("sent_geometry_factor: a/W > 0.95, ligament too short");
  const double c = 0.5 * std::numbers::pi * a_over_W;
  const double poly =
      0.752 + 2.02 * a_over_W + 0.37 * std::pow(1.0 - std::sin(c), 3);
  return std::sqrt(2.0 * std::tan(c)) / std::cos(c) * poly;
}

double sent_sif(double P, double B, double W, double a) {
  require(B > 0.0 && W > 0.0 && a > 0.0, "sent_sif: geometry must be positive");
  return P / (B * std::sqrt(W)) * sent_geometry_factor(a / W);
}

double sent_yield_load(double B, double W, double a, double sigma_y0) {
  require(B > 0.0 && W > 0.0 && a >= 0.0 && a < W, "sent_yield_load: invalid geometry");
  return 1.155 * B * W * sigma_y0 * (1.0 - a / W);
}

double toughness_from_Gc(double Gc, double E, double nu) {
  require(Gc > 0.0, "toughness_from_Gc: Gc must be positive");
  return std::sqrt(E / (1.0 - nu * nu) * Gc);
}

double thin_wall_pressure(double sigma_hoop, double t, double r) {
  require(t > 0.0 && r > 0.0, "thin_wall_pressure: geometry must be positive");
  return sigma_hoop * t / r;
}

AssessmentPoint assessment_point(double K, double Kc_eff, double P, double Py,
                                 const std::string& label) {
  require(Kc_eff > 0.0, "assessment_point: Kc_eff must be positive");
  require(Py > 0.0, "assessment_point: Py must be positive");
  return {P / Py, K / Kc_eff, label, P};
}

void FailureAssessmentLine::validate() const {
  require(Lr.size() == f.size() && Lr.size() >= 2, "FAL: need matching sample arrays");
  for (size_t i = 0; i + 1 < Lr.size(); ++i) {
    require(Lr[i + 1] > Lr[i], "FAL: Lr samples must be strictly increasing");
    require(f[i + 1] <= f[i] + 1e-12, "FAL: f must be monotone non-increasing");
  }
  for (double v : f) require(v > 0.0 && v <= 1.0 + 1e-12, "FAL: f out of (0, 1]");
  if (option != FalOption::opt3)
    require(std::abs(f.front() - 1.0) < 1e-9, "FAL: f(0) must equal 1");
  require(Lr_max > 0.0 && Lr_max <= Lr.back() + 1e-12, "FAL: cutoff outside sample range");
}

double FailureAssessmentLine::evaluate(double lr) const {
  require(lr >= 0.0 && lr <= Lr_max + 1e-12, "FAL: evaluation outside [0, Lr_max]");
  const auto d = pchip_slopes(Lr, f);
  return pchip_eval(Lr, f, d, lr);
}

FailureAssessmentLine build_fal(FalOption option, double E, double sigma_y0, double Lr_max,
                                const RefCurve& ref, int n_samples) {
  require(Lr_max > 0.0, "build_fal: Lr_max must be positive");
  require(n_samples >= 2, "build_fal: need at least two samples");
  FailureAssessmentLine fal;
  fal.option = option;
  fal.Lr_max = Lr_max;
  fal.Lr.resize(n_samples);
  fal.f.resize(n_samples);
  char prov[128];
  std::snprintf(prov, sizeof prov, "option=%d E=%.6g sigma_y0=%.6g Lr_max=%.6g", int(option), E,
                sigma_y0, Lr_max);
  fal.provenance = prov;
  for (int i = 0; i < n_samples; ++i) {
    const double lr = Lr_max * i / double(n_samples - 1);
    fal.Lr[i] = lr;
    switch (option) {
      case FalOption::opt1:
        fal.f[i] = fal_option1(lr, E, sigma_y0);
        break;
      case FalOption::opt2:
        require(bool(ref), "build_fal: option 2 requires a reference curve");
        fal.f[i] = fal_option2(lr, ref, E, sigma_y0);
        break;
      default:
        throw std::domain_error("build_fal: option 3 is built from tabulated J values");
    }
  }
  fal.validate();
  return fal;
}

FailureAssessmentLine build_fal_option3(const std::vector<double>& Lr,
                                        const std::vector<double>& J_ep,
                                        const std::vector<double>& J_e, double Lr_max) {
  require(Lr.size() == J_ep.size() && Lr.size() == J_e.size() && Lr.size() >= 2,
          "build_fal_option3: inconsistent table sizes");
  FailureAssessmentLine fal;
  fal.option = FalOption::opt3;
  fal.Lr = Lr;
  fal.Lr_max = Lr_max;
  fal.f.resize(Lr.size());
  for (size_t i = 0; i < Lr.size(); ++i) fal.f[i] = fal_option3(J_ep[i], J_e[i]);
  fal.provenance = "option=3 tabulated";
  fal.validate();
  return fal;
}

double safety_factor(const AssessmentPoint& point, const FailureAssessmentLine& fal) {
  fal.validate();
  const double lr = point.Lr, kr = point.Kr;
  require(lr >= 0.0 && kr >= 0.0, "safety_factor: point components must be non-negative");
  if (lr == 0.0 && kr == 0.0)
    throw std::domain_error("safety_factor: assessment point at the origin");
  if (lr == 0.0) return 1.0 / kr;  // vertical ray, f(0) = 1
  if (kr == 0.0) return fal.Lr_max / lr;

  // Ray (t*lr, t*kr). Intersect with the curve or the vertical cutoff.
  const double t_cut = fal.Lr_max / lr;
  auto miss = [&](double t) { return t * kr - fal.evaluate(t * lr); };  // <0 below FAL
  if (miss(t_cut) <= 0.0) return t_cut;  // passes under the curve, hits the cutoff segment
  double lo = 0.0, hi = t_cut;
  // Bisection to 1e-10 in the Lr coordinate.
  while ((hi - lo) * lr > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (miss(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

void LoadingPath::validate() const {
  for (size_t i = 0; i + 1 < points.size(); ++i)
    require(points[i + 1].load > points[i].load, "LoadingPath: loads must be strictly increasing");
  require(failure_index < int(points.size()), "LoadingPath: failure index out of range");
}

}  // namespace fadforge
