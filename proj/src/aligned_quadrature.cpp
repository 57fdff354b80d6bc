#include "ihb/aligned_quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace ihb {

std::vector<double> graded_breaks(double end, double first, double max_width) {
  std::vector<double> b;
  graded_breaks(end, first, max_width, b);
  return b;
}

void graded_breaks(double end, double first, double max_width, std::vector<double>& b) {
  b.assign(1, 0.0);
  double x = std::min(first, end);
  while (x < max_width && x < end) {
    b.push_back(x);
    x *= 2.0;
  }
  const double last = b.back();
  if (last < end) {
    const auto count = static_cast<std::size_t>(std::ceil((end - last) / max_width));
    for (std::size_t i = 1; i <= count; ++i) {
      b.push_back(i == count ? end : last + (end - last) * static_cast<double>(i) /
                                                static_cast<double>(count));
    }
  }
}

namespace {

// Modified Bessel I_0. All series terms are positive, so summing them is
// accurate to rounding; large arguments go to the library.
double bessel_i0(double z) {
  z = std::abs(z);
  if (z > 20.0) return std::cyl_bessel_i(0.0, z);
  static const auto inv_sq = [] {
    std::array<double, 64> t{};
    for (std::size_t k = 1; k < t.size(); ++k) t[k] = 1.0 / static_cast<double>(k * k);
    return t;
  }();
  const double q = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  for (std::size_t k = 1; k < inv_sq.size(); ++k) {
    term *= q * inv_sq[k];
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

}  // namespace

bool AlignedGeometry::supported(const KernelParams& p) {
  if (p.field == Field::real) return p.n >= 2 && p.n <= 4;
  return p.n == 1 || p.n == 2;
}

AlignedGeometry::AlignedGeometry(const KernelParams& p, std::span<const double> eta,
                                 const DensitySpec& g)
    : g_(&g) {
  if (!supported(p)) {
    throw Error(ErrorKind::unsupported_rule,
                "deterministic density quadrature is not available for " + p.describe() +
                    "; use a monte-carlo rule");
  }
  const std::vector<double>& e = g.axis().coords();
  if (e.size() != eta.size()) {
    throw Error(ErrorKind::dimension_mismatch, "density axis does not match the point");
  }
  std::vector<double> perp(e.begin(), e.end());
  c_pole_ = dot(eta, e);
  for (std::size_t i = 0; i < perp.size(); ++i) perp[i] -= c_pole_ * eta[i];
  if (p.field == Field::complex && p.n == 2) {
    kind_ = Kind::disk;
    slice_k_ = 1;
    std::vector<double> i_eta(eta.size());
    for (std::size_t j = 0; j + 1 < eta.size(); j += 2) {
      i_eta[j] = -eta[j + 1];
      i_eta[j + 1] = eta[j];
    }
    c_turn_ = dot(i_eta, e);
    for (std::size_t i = 0; i < perp.size(); ++i) perp[i] -= c_turn_ * i_eta[i];
  } else {
    kind_ = Kind::zonal;
    slice_k_ = static_cast<int>(eta.size()) - 2;
  }
  double norm2 = 0.0;
  for (double v : perp) norm2 += v * v;
  c_perp_ = std::sqrt(norm2);
  sphere_measure_ = sphere_area(static_cast<std::size_t>(slice_k_) + 1);
  // E[w_1^j] for w uniform on S^k: prod_{i < j/2} (2i+1)/(k+1+2i), odd j vanish.
  moment_.assign(7, 0.0);
  moment_[0] = 1.0;
  for (std::size_t j = 2; j < moment_.size(); j += 2) {
    const double i = static_cast<double>(j / 2 - 1);
    moment_[j] = moment_[j - 2] * (2.0 * i + 1.0) / (slice_k_ + 1.0 + 2.0 * i);
  }
}

double AlignedGeometry::slice_average(double x0, double beta) const {
  const std::vector<double>& c = g_->params();
  switch (g_->family()) {
    case DensityFamily::constant:
      return c[0] * sphere_measure_;
    case DensityFamily::zonal_poly: {
      // Expand G(x0 + y) in powers of y (Taylor shift by synthetic division)
      // and keep the even moments.
      std::array<double, 7> b{};
      const std::size_t deg = c.size();
      std::copy(c.begin(), c.end(), b.begin());
      for (std::size_t i = 0; i + 1 < deg; ++i) {
        for (std::size_t k = deg - 1; k-- > i;) b[k] += x0 * b[k + 1];
      }
      double acc = 0.0;
      double beta_pow = 1.0;
      for (std::size_t j = 0; j < deg; j += 2) {
        acc += b[j] * beta_pow * moment_[j];
        beta_pow *= beta * beta;
      }
      return sphere_measure_ * acc;
    }
    case DensityFamily::exp_zonal: {
      const double scale = c[0] * std::exp(c[1] * x0);
      const double z = c[1] * beta;
      switch (slice_k_) {
        case 0:
          return scale * 2.0 * std::cosh(z);
        case 1:
          return scale * 2.0 * std::numbers::pi * bessel_i0(z);
        default: {
          const double sinhc = std::abs(z) < 1e-8 ? 1.0 + z * z / 6.0 : std::sinh(z) / z;
          return scale * 4.0 * std::numbers::pi * sinhc;
        }
      }
    }
  }
  return 0.0;
}

double AlignedGeometry::slice_average_pair(double x0, double t, double beta) const {
  if (g_->family() == DensityFamily::exp_zonal && slice_k_ == 1) {
    const std::vector<double>& c = g_->params();
    return c[0] * (std::exp(c[1] * (x0 + t)) + std::exp(c[1] * (x0 - t))) * 2.0 *
           std::numbers::pi * bessel_i0(c[1] * beta);
  }
  return slice_average(x0 + t, beta) + slice_average(x0 - t, beta);
}

}  // namespace ihb
