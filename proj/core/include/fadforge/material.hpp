#pragma once

#include <vector>

#include "fadforge/tensor.hpp"

namespace fadforge {

// Unit system: N - mm - MPa - s.  Gc in N/mm, K in MPa*sqrt(mm).

/// Small residual stiffness factor added to g(phi) so fully broken
/// quadrature points keep an invertible tangent.
constexpr double kResidualStiffness = 1e-8;

struct MaterialParams {
  double E = 200000.0;     // Young's modulus [MPa]
  double nu = 0.3;         // Poisson ratio
  double sigma_y0 = 800.0; // initial yield stress [MPa]
  double n = 0.1;          // hardening exponent; n = 0 is the perfectly plastic branch
  double Gc = 88.0;        // critical energy release rate [N/mm]
  double ell = 1.0;        // phase-field length scale [mm]
  double beta = 0.1;       // fraction of plastic work driving damage

  double bulk() const { return E / (3.0 * (1.0 - 2.0 * nu)); }
  double shear() const { return E / (2.0 * (1.0 + nu)); }
  double E_prime() const { return E / (1.0 - nu * nu); }  // plane strain

  /// Throws std::domain_error when a parameter is out of range.
  void validate() const;
};

struct HydrogenParams {
  double D = 4.5e-4;    // apparent diffusivity [mm^2/s]
  double Vh = 2000.0;   // partial molar volume [mm^3/mol]
  double S = 0.077;     // Sievert solubility [wppm/sqrt(MPa)]
  double f_min = 0.65;  // residual toughness fraction
  double q1 = 30.0;
  double q2 = 1.0;
  double T = 293.0;     // temperature [K]
  double R = 8314.0;    // gas constant [N*mm/(mol*K)]

  void validate() const;
};

/// Per-quadrature-point state. H, eps_p_eq, psi_p are non-decreasing in time;
/// phi lives in [0,1]; C >= 0.
struct PointState {
  SymTensor2 eps;     // total strain from the kinematics
  SymTensor2 eps0;    // initial elastic strain offset (residual stress import)
  SymTensor2 eps_p;   // plastic strain
  SymTensor2 sigma;   // degraded stress
  double eps_p_eq = 0.0;
  double phi = 0.0;
  double H = 0.0;      // history field, max of tensile elastic energy
  double psi_p = 0.0;  // plastic dissipated energy density
  double C = 0.0;      // hydrogen concentration [wppm]
  double work_density = 0.0;         // accumulated sigma : deps
  double plastic_dissipation = 0.0;  // accumulated sigma : deps_p
};

struct StressUpdateResult {
  SymTensor2 sigma;
  PointState state;
  // Algorithmic consistent tangent in Voigt form (xx, yy, xy) acting on
  // (d_eps_xx, d_eps_yy, d_gamma_xy).
  double tangent[3][3];
  int iterations = 0;
  double yield_residual = 0.0;
  double delta_eps_p_eq = 0.0;
};

double degradation_g(double phi);
double degradation_g_deriv(double phi);
double degradation_gp(double phi, double beta);

/// Undegraded flow stress sigma_y0 (1 + E e / sigma_y0)^n.
double flow_stress(double eps_p_eq, const MaterialParams& p);
/// Hardening modulus d(flow_stress)/d(eps_p_eq).
double hardening_modulus(double eps_p_eq, const MaterialParams& p);

/// Dissipated plastic energy density for the power-law yield surface.
double plastic_energy(double eps_p_eq, const MaterialParams& p);

/// Tensile part of the elastic energy density (volumetric-deviatoric split),
/// evaluated with undegraded moduli. The running max is applied by the caller.
double elastic_driving_energy(const SymTensor2& eps_e, const MaterialParams& p);

/// Elastic predictor / radial return corrector on the degraded yield surface.
/// eps_trial is the total strain; the initial strain offset and plastic strain
/// come from state_old.
StressUpdateResult stress_update(const SymTensor2& eps_trial, const PointState& state_old,
                                 const MaterialParams& p);

/// Toughness knockdown f(C) = f_min + (1 - f_min) exp(-q1 C^q2).
double hydrogen_toughness_factor(double C, const HydrogenParams& p);

/// Sievert boundary concentration S sqrt(p).
double sievert_concentration(double pressure, double S);

/// Peak stress of the homogeneous 1D elastic solution, sqrt(27 E Gc / (256 l)).
double critical_stress_1d(const MaterialParams& p);

/// Inverts the 1D strength relation to pin the ductility ratio r_y =
/// sigma_c / sigma_y0: ell = 27 E Gc / (256 (r_y sigma_y0)^2).
double length_scale_for_ductility(double r_y, const MaterialParams& p);

struct UniaxialPoint {
  double strain = 0.0;
  double stress = 0.0;
  double phi = 0.0;
  double eps_p_eq = 0.0;
};

struct UniaxialCurve {
  std::vector<UniaxialPoint> points;
  double sigma_u = 0.0;        // peak stress
  double strain_at_peak = 0.0;

  /// First strain past the peak where stress has dropped to the given
  /// fraction of sigma_u; returns the last strain when not reached.
  double strain_at_drop(double fraction) const;
};

/// Homogeneous 1D response: scalar stress update coupled with the local
/// phase-field balance (Gc/l) phi = 2 (1-phi) (H + beta psi_p), solved by a
/// damped fixed-point alternation per strain level.
UniaxialCurve homogeneous_1d_response(const MaterialParams& p,
                                      const std::vector<double>& strain_grid);

/// Convenience variant: builds its own strain grid and marches until the
/// response is clearly past the peak.
UniaxialCurve homogeneous_1d_response(const MaterialParams& p);

/// Peak of the homogeneous 1D curve (the ultimate strength sigma_u).
double ultimate_stress_1d(const MaterialParams& p);

/// Material-point driver: prescribes the axial strain and solves the lateral
/// strains so that both lateral stresses vanish (uniaxial stress state), using
/// the full tensorial stress update. With couple_phi the local phase-field
/// balance is solved as in homogeneous_1d_response.
UniaxialCurve uniaxial_stress_response(const MaterialParams& p,
                                       const std::vector<double>& strain_grid,
                                       bool couple_phi);

}  // namespace fadforge
