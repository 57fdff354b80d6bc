#pragma once

// Reference paths that share no quadrature or kernel code with the evaluator.

#include <cstdint>
#include <functional>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "ihb/io.hpp"
#include "ihb/measures.hpp"

namespace ihb {

struct OracleValue {
  double value = 0.0;
  double std_error = 0.0;
};

inline constexpr std::size_t kOracleSamples = 1'000'000;

/// Closed-form atoms plus a plain Monte Carlo average of the density part.
OracleValue oracle_evaluate_u(const KernelParams& p, const MeasureSpec& m,
                              std::span<const double> x, std::size_t samples = kOracleSamples,
                              std::uint64_t seed = 0);

/// Monte Carlo estimate of int g(xi) k(xi) dsigma(xi) with a caller-supplied
/// boundary kernel; used for limit targets.
OracleValue oracle_density_integral(const MeasureSpec& m,
                                    const std::function<double(std::span<const double>)>& k,
                                    std::size_t samples, std::uint64_t seed);

/// Poisson kernel straight from its definition, in Cartesian coordinates.
double oracle_kernel(const KernelParams& p, std::span<const double> x,
                     std::span<const double> zeta);

enum class Direction { non_increasing, non_decreasing };

struct ScanResult {
  bool verdict = true;
  /// Index of the first element that breaks the order.
  std::optional<std::size_t> first_violation;
};

/// Relative slack: v[i+1] may exceed v[i] by slack * max(|v[i]|, |v[i+1]|).
ScanResult oracle_monotone_scan(const std::vector<double>& values, Direction dir, double slack);

struct SweepRanges {
  std::vector<int> ns;            // empty: per-check default
  std::vector<double> lambdas;    // empty: per-check default
  double r_max = 0.999;
};

struct SweepSummary {
  std::string check;
  std::size_t trials = 0;
  std::size_t violations = 0;
  double worst_slack = 0.0;
  std::vector<json> counterexamples;  // trial order, at most kMaxCounterexamples
};

inline constexpr std::size_t kMaxCounterexamples = 20;

/// Checks: scalar-inequality, real-derivative, complex-derivative,
/// complex-derivative-reduced-exponent, complex-derivative-halved-coefficient,
/// log-derivative, envelope-forms, envelope.
SweepSummary inequality_sweep(const std::string& check, std::size_t trials, std::uint64_t seed,
                              const SweepRanges& ranges = {});

const std::vector<std::string>& sweep_checks();

json sweep_summary_json(const SweepSummary& s);

}  // namespace ihb
