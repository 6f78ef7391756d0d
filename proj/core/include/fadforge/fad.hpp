#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fadforge/material.hpp"

namespace fadforge {

enum class FalOption { opt1 = 1, opt2 = 2, opt3 = 3 };

/// Reference strain as a function of reference stress; must cover the
/// evaluation range of sigma_ref = Lr * sigma_y0.
using RefCurve = std::function<double(double sigma)>;

/// Total-strain curve of the power-law material: eps = sigma/E below yield,
/// plus the inverted hardening law above.
RefCurve power_law_ref_curve(const MaterialParams& p);

struct RambergOsgoodFit {
  double alpha = 0.0;
  double m = 1.0;
  RefCurve curve(double E, double sigma_y0) const;
};

/// Least-squares fit of eps = sigma/E + alpha (sigma_y0/E) (sigma/sigma_y0)^m
/// to sampled stress-strain data (plastic part linearized in log space).
RambergOsgoodFit fit_ramberg_osgood(const std::vector<std::pair<double, double>>& stress_strain,
                                    double E, double sigma_y0);

double fal_option1(double Lr, double E, double sigma_y0);
double fal_option1_mu(double E, double sigma_y0);
double fal_option2(double Lr, const RefCurve& ref, double E, double sigma_y0);
double fal_option3(double J_ep, double J_e);
double cutoff_lr_max(double sigma_y0, double sigma_u);

double sent_geometry_factor(double a_over_W);
double sent_sif(double P, double B, double W, double a);
double sent_yield_load(double B, double W, double a, double sigma_y0);
double toughness_from_Gc(double Gc, double E, double nu);
double thin_wall_pressure(double sigma_hoop, double t, double r);

struct AssessmentPoint {
  double Lr = 0.0;
  double Kr = 0.0;
  std::string label;
  double load = 0.0;  // applied load [N] or pressure [MPa]
};

AssessmentPoint assessment_point(double K, double Kc_eff, double P, double Py,
                                 const std::string& label = {});

/// Sampled failure assessment line with plastic-collapse cutoff. Evaluation
/// between samples uses monotone cubic (PCHIP) interpolation.
struct FailureAssessmentLine {
  FalOption option = FalOption::opt1;
  std::vector<double> Lr;  // strictly increasing, Lr.front() == 0
  std::vector<double> f;   // f(0) == 1 for options 1/2, monotone non-increasing
  double Lr_max = 1.0;
  std::string provenance;

  double evaluate(double lr) const;  // valid on [0, Lr_max]
  void validate() const;
};

/// Builds an option 1 or option 2 FAL on n uniformly spaced samples of
/// [0, Lr_max]. Option 2 requires a reference curve.
FailureAssessmentLine build_fal(FalOption option, double E, double sigma_y0, double Lr_max,
                                const RefCurve& ref = {}, int n_samples = 512);

/// Builds an option 3 FAL from tabulated (Lr, J_ep, J_e) triples.
FailureAssessmentLine build_fal_option3(const std::vector<double>& Lr,
                                        const std::vector<double>& J_ep,
                                        const std::vector<double>& J_e, double Lr_max);

/// Radial safety factor |OB| / |OA| where B is the intersection of the ray
/// through the assessment point with the FAL (including the vertical cutoff
/// segment at Lr_max). SF > 1 means the point lies inside the envelope.
double safety_factor(const AssessmentPoint& point, const FailureAssessmentLine& fal);

struct LoadingPath {
  std::vector<AssessmentPoint> points;  // strictly increasing load
  int failure_index = -1;               // first failing point, -1 if none

  void validate() const;
};

}  // namespace fadforge
