#include "ihb/geometry.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>

namespace ihb {

namespace {

constexpr double kPi = std::numbers::pi;

void require_dim(std::size_t dim) {
  if (dim < 2) {
    throw Error(ErrorKind::invalid_dimension,
                "sphere dimension must be >= 2, got " + std::to_string(dim));
  }
}

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
  }
  const double dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

GaussLegendre compute_gauss_legendre(std::size_t n) {
  GaussLegendre g;
  g.x.resize(n);
  g.w.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.x[i] = -x;
    g.x[n - 1 - i] = x;
    g.w[i] = w;
    g.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.x[n / 2] = 0.0;
  return g;
}

}  // namespace

SpherePoint::SpherePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) {
    throw Error(ErrorKind::invalid_dimension, "sphere point needs coordinates");
  }
  double norm2 = 0.0;
  for (double c : coords_) {
    if (!std::isfinite(c)) {
      throw Error(ErrorKind::validation, "sphere point has non-finite coordinate");
    }
    norm2 += c * c;
  }
  if (norm2 == 0.0) {
    throw Error(ErrorKind::validation, "cannot normalize the zero vector");
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& c : coords_) c *= inv;
}

SpherePoint SpherePoint::basis(std::size_t dim, std::size_t i) {
  std::vector<double> c(dim, 0.0);
  c.at(i) = 1.0;
  return SpherePoint(std::move(c));
}

double SpherePoint::dot(const SpherePoint& other) const {
  return ihb::dot(coords_, other.coords_);
}

SpherePoint SpherePoint::negated() const {
  std::vector<double> c = coords_;
  for (double& v : c) v = -v;
  return SpherePoint(std::move(c));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::dimension_mismatch, "dot product of vectors of different length");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double chord2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(const SpherePoint& a, const SpherePoint& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::dimension_mismatch, "points of different dimension");
  }
  return std::sqrt(chord2(a.coords(), b.coords()));
}

BallPoint::BallPoint(double r, SpherePoint direction)
    : r_(r), direction_(std::move(direction)) {
  if (!(r >= 0.0)) throw Error(ErrorKind::domain, "r must be >= 0");
  if (!(r < 1.0)) throw Error(ErrorKind::domain, "r must be < 1");
}

BallPoint BallPoint::from_cartesian(std::span<const double> x) {
  double norm2 = 0.0;
  for (double c : x) norm2 += c * c;
  const double r = std::sqrt(norm2);
  if (r == 0.0) return BallPoint(0.0, SpherePoint::basis(x.size(), 0));
  return BallPoint(r, SpherePoint(std::vector<double>(x.begin(), x.end())));
}

std::vector<double> BallPoint::cartesian() const {
  std::vector<double> x = direction_.coords();
  for (double& c : x) c *= r_;
  return x;
}

double sphere_area(std::size_t d) {
  const double half = 0.5 * static_cast<double>(d);
  return 2.0 * std::pow(kPi, half) / std::tgamma(half);
}

void sample_uniform_flat(std::size_t dim, std::size_t count, std::uint64_t seed,
                         std::vector<double>& out) {
  require_dim(dim);
  out.assign(dim * count, 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    double* p = out.data() + i * dim;
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        p[k] = normal(rng);
        norm2 += p[k] * p[k];
      }
    } while (norm2 < 1e-300);
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t k = 0; k < dim; ++k) p[k] *= inv;
  }
}

std::vector<SpherePoint> sample_uniform(std::size_t dim, std::size_t count,
                                        std::uint64_t seed) {
  std::vector<double> flat;
  sample_uniform_flat(dim, count, seed, flat);
  std::vector<SpherePoint> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    pts.emplace_back(std::vector<double>(flat.begin() + i * dim,
                                         flat.begin() + (i + 1) * dim));
  }
  return pts;
}

SpherePoint QuadratureRule::point(std::size_t i) const {
  const auto x = node(i);
  return SpherePoint(std::vector<double>(x.begin(), x.end()));
}

const GaussLegendre& gauss_legendre(std::size_t order) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussLegendre>> cache;
  if (order == 0) throw Error(ErrorKind::argument, "Gauss-Legendre order must be positive");
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussLegendre>(compute_gauss_legendre(order));
  return *slot;
}

QuadratureRule build_quadrature(std::size_t dim, std::size_t level, RuleKind kind,
                                std::optional<std::uint64_t> seed) {
  require_dim(dim);
  if (level == 0) throw Error(ErrorKind::argument, "quadrature level must be positive");
  QuadratureRule rule;
  rule.dim = dim;
  rule.kind = kind;
  rule.level = level;
  rule.seed = seed;

  if (kind == RuleKind::monte_carlo) {
    sample_uniform_flat(dim, level, seed.value_or(0), rule.nodes);
    rule.weights.assign(level, sphere_area(dim) / static_cast<double>(level));
    return rule;
  }

  if (dim == 2) {
    rule.nodes.reserve(2 * level);
    for (std::size_t k = 0; k < level; ++k) {
      const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(level);
      rule.nodes.push_back(std::cos(t));
      rule.nodes.push_back(std::sin(t));
    }
    rule.weights.assign(level, 2.0 * kPi / static_cast<double>(level));
    return rule;
  }

  const std::size_t naz = 2 * level;
  const double waz = 2.0 * kPi / static_cast<double>(naz);
  const GaussLegendre& gl = gauss_legendre(level);

  if (dim == 3) {
    rule.nodes.reserve(3 * level * naz);
    for (std::size_t i = 0; i < level; ++i) {
      const double z = gl.x[i];
      const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (std::size_t j = 0; j < naz; ++j) {
        const double p = waz * static_cast<double>(j);
        rule.nodes.insert(rule.nodes.end(), {s * std::cos(p), s * std::sin(p), z});
        rule.weights.push_back(gl.w[i] * waz);
      }
    }
    return rule;
  }

  if (dim == 4) {
    // chi in [0, pi] carries the sin^2 chi factor; rescaled so the chi
    // weights integrate sin^2 exactly to pi/2.
    std::vector<double> chi(level), wchi(level);
    double total = 0.0;
    for (std::size_t i = 0; i < level; ++i) {
      chi[i] = 0.5 * kPi * (gl.x[i] + 1.0);
      const double s = std::sin(chi[i]);
      wchi[i] = 0.5 * kPi * gl.w[i] * s * s;
      total += wchi[i];
    }
    for (double& w : wchi) w *= (0.5 * kPi) / total;
    rule.nodes.reserve(4 * level * level * naz);
    for (std::size_t i = 0; i < level; ++i) {
      const double c0 = std::cos(chi[i]);
      const double s0 = std::sin(chi[i]);
      for (std::size_t k = 0; k < level; ++k) {
        const double z = gl.x[k];
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (std::size_t j = 0; j < naz; ++j) {
          const double p = waz * static_cast<double>(j);
          rule.nodes.insert(rule.nodes.end(),
                            {c0, s0 * z, s0 * s * std::cos(p), s0 * s * std::sin(p)});
          rule.weights.push_back(wchi[i] * gl.w[k] * waz);
        }
      }
    }
    return rule;
  }

  throw Error(ErrorKind::unsupported_rule,
              "deterministic product rule not available for dim " + std::to_string(dim) +
                  "; use a monte-carlo rule");
}

namespace detail {

void throw_overflow(std::span<const double> node) {
  std::ostringstream os;
  os.precision(17);
  os << "integrand is not finite at node [";
  for (std::size_t i = 0; i < node.size(); ++i) os << (i ? ", " : "") << node[i];
  os << "]";
  throw IntegrandOverflow(std::vector<double>(node.begin(), node.end()), os.str());
}

Integral finish(const QuadratureRule& rule, const SumMoments& acc) {
  Integral out;
  out.value = acc.sum;
  if (rule.kind == RuleKind::monte_carlo && acc.m.count > 1) {
    const double n = static_cast<double>(acc.m.count);
    const double mean = acc.m.sum / n;
    const double var = std::max(0.0, (acc.m.sum_sq / n - mean * mean) * n / (n - 1.0));
    out.std_error = sphere_area(rule.dim) * std::sqrt(var / n);
  }
  return out;
}

}  // namespace detail
}  // namespace ihb
