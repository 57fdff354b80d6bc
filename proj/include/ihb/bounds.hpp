#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ihb/evaluator.hpp"

namespace ihb {

/// phi(r) = (1-r)^p / (1+r)^q and psi(r) = (1+r)^p / (1-r)^q with p the mass
/// exponent (n-1 real, n complex) and q the boundary exponent (1+2lambda real,
/// n+2alpha complex).
double log_phi(const KernelParams& p, double r);
double log_psi(const KernelParams& p, double r);
double phi(const KernelParams& p, double r);
double psi(const KernelParams& p, double r);
/// phi'/phi and psi'/psi.
double phi_log_derivative(const KernelParams& p, double r);
double psi_log_derivative(const KernelParams& p, double r);

struct MonotoneScan {
  bool verdict = true;
  std::optional<std::size_t> first_violation;  // index i with (i, i+1) violating
  double worst_margin = 0.0;  // most negative relative margin seen (0 if none)
};

/// Consecutive-pair scan with relative slack; `rel_err[i]` is the relative
/// uncertainty of values[i].
MonotoneScan scan_monotone(const std::vector<double>& values, const std::vector<double>& rel_err,
                           bool increasing, double min_slack = 1e-9);

struct MonotoneReport {
  std::vector<double> phi_u;
  std::vector<double> psi_u;
  bool phi_decreasing_expected = true;
  MonotoneScan phi;
  MonotoneScan psi;
  bool low_confidence = false;

  bool verdict() const { return phi.verdict && psi.verdict; }
};

MonotoneReport monotone_profiles(const RadialProfile& profile);

struct LogDerivativeCheck {
  bool verdict = false;
  double lower = 0.0;     // -(a + b r) / (1 - r^2)
  double upper = 0.0;     // (a - b r) / (1 - r^2)
  double observed = 0.0;  // central-difference u'/u
  double slack_lower = 0.0;  // (observed - lower)(1 - r^2)
  double slack_upper = 0.0;  // (upper - observed)(1 - r^2)
  double tolerance = 0.0;    // in the same units as the slacks
};

/// Central difference of u along the ray through x with step h.
LogDerivativeCheck log_derivative_bounds_check(const KernelParams& p, const MeasureSpec& m,
                                               const BallPoint& x, const QuadratureRule& rule,
                                               double h, double tol = 1e-6);

/// Bounds on f(r) from f(r') when -(a+br)/(1-r^2) <= f'/f <= (a-br)/(1-r^2).
std::pair<double, double> generic_ray_bound(double a, double b, double f_rprime, double r_prime,
                                            double r);

struct HarnackEnvelope {
  double lower = 0.0;  // closed form
  double upper = 0.0;
  double generic_lower = 0.0;  // generic_ray_bound with the kernel (a, b)
  double generic_upper = 0.0;
  double max_rel_diff = 0.0;
};

/// Two-sided bound on u(r zeta) given u(r' zeta) in closed form,
/// cross-checked against generic_ray_bound.
HarnackEnvelope harnack_envelope(const KernelParams& p, double u_rprime, double r_prime,
                                 double r);

/// ((1+r)/(1+r'))^{-2n-2alpha} ((1-r^2)/(1-r'^2))^{n+2alpha} u(r'); for
/// alpha < -n this equals the upper bound, so it is not a valid lower bound.
double collapsed_complex_lower_bound(const KernelParams& p, double u_rprime, double r_prime,
                                     double r);

struct EnvelopeReport {
  double r_prime = 0.0;
  double r = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double observed = 0.0;
  bool verdict = false;
  std::pair<double, double> slack{0.0, 0.0};  // relative (observed-lower, upper-observed)
  double tolerance = 0.0;
};

EnvelopeReport verify_envelope(const KernelParams& p, const MeasureSpec& m,
                               const SpherePoint& zeta, double r_prime, double r,
                               const QuadratureRule& rule, const EvalOptions& opt = {});

/// Ball of radius R: phi_R(r) = R^{-(n-2-2lambda)} (R-r)^{n-1} / (R+r)^{1+2lambda}
/// and the matching psi_R. `profile` holds u(r zeta) for r in [0, R).
double phi_scaled(const KernelParams& p, double R, double r);
double psi_scaled(const KernelParams& p, double R, double r);
MonotoneReport scaled_ball_profiles(const KernelParams& p, double R, const RadialProfile& profile);
/// Harnack bounds on u(x), |x| = r < R, in terms of u(0).
std::pair<double, double> scaled_ball_envelope(const KernelParams& p, double R, double r,
                                               double u0);

struct SphereExtremum {
  double value = 0.0;
  std::vector<double> direction;
  double gap = 0.0;  // refinement uncertainty
};

struct ExtremaComparison {
  std::string name;
  double left = 0.0;   // normalized quantity at r
  double right = 0.0;  // normalized quantity at r'
  bool less_equal = true;  // expected relation left <= right (else >=)
  bool verdict = false;
  double tolerance = 0.0;
};

struct SphereExtremaReport {
  SphereExtremum max_r, min_r, max_rp, min_rp;
  std::vector<ExtremaComparison> comparisons;
  double quadrature_error = 0.0;
  bool verdict() const;
};

SphereExtremaReport sphere_extrema_bounds(const KernelParams& p, const MeasureSpec& m,
                                          double r_prime, double r, const QuadratureRule& rule,
                                          std::size_t search_level, std::uint64_t seed = 0,
                                          const EvalOptions& opt = {});

struct PhiShape {
  std::optional<double> critical_r;
  bool sign_pattern_ok = true;
};

/// Where phi' changes sign (lambda < -n/2, or alpha < -n for the complex
/// analogue), with a sampled check of the sign pattern.
PhiShape phi_shape_diagnostic(const KernelParams& p);

/// CSV with header r,u,phi_u,psi_u,err and 17 significant digits.
std::string profile_csv(const RadialProfile& profile);

}  // namespace ihb
