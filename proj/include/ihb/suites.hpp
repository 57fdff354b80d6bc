#pragma once

// Randomized verification suites behind `ihb verify`. Reports contain no
// timings, so equal options give byte-identical output.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ihb/io.hpp"
#include "ihb/measures.hpp"

namespace ihb {

struct RandomMeasureOptions {
  std::size_t min_atoms = 0;
  std::size_t max_atoms = 3;
  double density_probability = 0.5;
};

/// min_atoms..max_atoms atoms plus, with the given probability (always when
/// there are no atoms), a positive constant, zonal-poly or exp-zonal density.
MeasureSpec random_measure(std::mt19937_64& rng, std::size_t dim,
                           const RandomMeasureOptions& opt = {});

/// `count` points from 0 to r_max inclusive.
std::vector<double> linear_grid(std::size_t count, double r_max);
/// 0 and 1 - 2^{-k} for k = 1..K.
std::vector<double> geometric_grid(int K);

/// "real:2,3:-2,0,0.5;complex:1:0,1" -> every (field, n, lambda) combination.
std::vector<KernelParams> parse_params_grid(std::string_view spec);

struct SuiteOptions {
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  std::optional<double> tol;
  std::vector<KernelParams> grid;  // empty: the suite's default grid
  bool negative_control = false;
};

struct SuiteResult {
  json report;
  std::size_t violations = 0;
};

/// monotone, harnack, lemma-bounds, extrema, residual, or all.
SuiteResult run_suite(const std::string& name, const SuiteOptions& opt);

const std::vector<std::string>& suite_names();

}  // namespace ihb
