#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ihb/evaluator.hpp"
#include "ihb/io.hpp"

namespace ihb {

enum class LimitKind { mass, potential };
enum class LimitClass { finite, divergent };

const char* to_string(LimitKind k);
const char* to_string(LimitClass c);

struct LimitReport {
  LimitKind kind = LimitKind::mass;
  KernelParams params;
  SpherePoint zeta;
  std::vector<double> r_sequence;
  std::vector<double> values;
  /// Extrapolated ladder limit; empty when the ladder diverges.
  std::optional<double> estimate;
  double estimate_error = 0.0;
  /// Analytic value from the measure; empty when divergent.
  std::optional<double> target;
  /// Complex potential limit only: 2^{n+2a} int |zeta - xi|^{-(2n+2a)} dmu.
  std::optional<double> statement_target;
  LimitClass classification = LimitClass::finite;         // from the ladder
  LimitClass target_classification = LimitClass::finite;  // from the measure
  std::optional<double> rel_gap;
  bool overflowed = false;
  bool numerical_estimate_only = false;

  bool classes_agree() const { return classification == target_classification; }
};

struct LadderOptions {
  int k_min = 3;
  int k_max = 18;
  /// The ladder keeps growing past k_max, up to this rung, until it settles.
  int k_extend = 48;
  EvalOptions eval;
};

/// (1-r)^{n-1} u(r zeta) (real) or (1-r)^n u(r zeta) (complex) as r -> 1.
LimitReport limit_mass(const KernelParams& p, const MeasureSpec& m, const SpherePoint& zeta,
                       const QuadratureRule& rule, const LadderOptions& opt = {});

/// u(r zeta) / (1-r)^{1+2 lambda} (real) or / (1-r)^{n+2 alpha} (complex).
LimitReport limit_potential(const KernelParams& p, const MeasureSpec& m,
                            const SpherePoint& zeta, const QuadratureRule& rule,
                            const LadderOptions& opt = {});

/// Analytic targets alone (no ladder).
std::optional<double> mass_limit_target(const KernelParams& p, const MeasureSpec& m,
                                        const SpherePoint& zeta, const QuadratureRule& rule);
std::optional<double> potential_limit_target(const KernelParams& p, const MeasureSpec& m,
                                             const SpherePoint& zeta,
                                             const QuadratureRule& rule);

/// Whether the density part of the potential target integral converges at
/// zeta, given the vanishing order of the density there.
bool density_potential_converges(const KernelParams& p, const MeasureSpec& m,
                                 const SpherePoint& zeta);

/// Eliminates t^{e_i} terms from g sampled at t_k = 2^{-k}; returns the
/// extrapolated value and the change made by the final elimination.
std::pair<double, double> richardson(const std::vector<double>& g,
                                     const std::vector<double>& exponents);

json limit_report_json(const LimitReport& r);

}  // namespace ihb
