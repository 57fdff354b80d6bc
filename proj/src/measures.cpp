#include "ihb/measures.hpp"

#include <cmath>
#include <numbers>

#include "json.hpp"

namespace ihb {

namespace {

using nlohmann::json;

constexpr std::size_t kValidationSamples = 20001;

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

const char* to_string(DensityFamily f) {
  switch (f) {
    case DensityFamily::constant: return "constant";
    case DensityFamily::zonal_poly: return "zonal-poly";
    case DensityFamily::exp_zonal: return "exp-zonal";
  }
  return "unknown";
}

DensitySpec::DensitySpec(DensityFamily family, std::vector<double> params, SpherePoint axis)
    : family_(family), params_(std::move(params)), axis_(std::move(axis)) {
  for (double p : params_) {
    if (!std::isfinite(p)) throw Error(ErrorKind::validation, "density.params must be finite");
  }
  switch (family_) {
    case DensityFamily::constant:
      if (params_.size() != 1) {
        throw Error(ErrorKind::validation, "density.params: constant family takes [c]");
      }
      if (params_[0] < 0.0) {
        throw Error(ErrorKind::validation, "density.params: constant c must be >= 0");
      }
      break;
    case DensityFamily::zonal_poly:
      if (params_.empty() || params_.size() > 7) {
        throw Error(ErrorKind::validation,
                    "density.params: zonal-poly takes 1 to 7 coefficients (degree <= 6)");
      }
      break;
    case DensityFamily::exp_zonal:
      if (params_.size() != 2) {
        throw Error(ErrorKind::validation, "density.params: exp-zonal takes [c, kappa]");
      }
      if (params_[0] < 0.0) {
        throw Error(ErrorKind::validation, "density.params: exp-zonal c must be >= 0");
      }
      break;
  }
  double lowest = profile(-1.0);
  for (std::size_t i = 0; i < kValidationSamples; ++i) {
    const double t = -1.0 + 2.0 * static_cast<double>(i) / (kValidationSamples - 1);
    lowest = std::min(lowest, profile(t));
  }
  if (lowest < -1e-12) {
    throw Error(ErrorKind::validation,
                "density.params: density is negative on the sphere (min " +
                    std::to_string(lowest) + ")");
  }
}

double DensitySpec::profile(double t) const {
  switch (family_) {
    case DensityFamily::constant:
      return params_[0];
    case DensityFamily::zonal_poly: {
      double acc = 0.0;
      for (std::size_t k = params_.size(); k-- > 0;) acc = acc * t + params_[k];
      return acc;
    }
    case DensityFamily::exp_zonal:
      return params_[0] * std::exp(params_[1] * t);
  }
  return 0.0;
}

double DensitySpec::operator()(std::span<const double> xi) const {
  if (family_ == DensityFamily::constant) return params_[0];
  return profile(dot(xi, axis_.coords()));
}

double DensitySpec::mass() const {
  const std::size_t d = dim();
  const GaussLegendre& gl = gauss_legendre(256);
  const double half_pi = 0.5 * std::numbers::pi;
  double acc = 0.0;
  for (std::size_t i = 0; i < gl.x.size(); ++i) {
    const double theta = half_pi * (gl.x[i] + 1.0);
    acc += gl.w[i] * profile(std::cos(theta)) *
           std::pow(std::sin(theta), static_cast<double>(d) - 2.0);
  }
  return sphere_area(d - 1) * half_pi * acc;
}

bool DensitySpec::identically_zero() const {
  if (family_ == DensityFamily::zonal_poly) return max_abs(params_) == 0.0;
  return params_[0] == 0.0;
}

std::optional<int> DensitySpec::vanishing_order(const SpherePoint& p) const {
  if (identically_zero()) return std::nullopt;
  if (family_ != DensityFamily::zonal_poly) return 0;
  const double t0 = std::clamp(p.dot(axis_), -1.0, 1.0);
  // Taylor coefficients of G about t0.
  const std::size_t deg = params_.size();
  std::vector<double> taylor(deg, 0.0);
  for (std::size_t k = 0; k < deg; ++k) {
    double binom = 1.0;
    double pw = 1.0;
    for (std::size_t j = k; j < deg; ++j) {
      taylor[k] += params_[j] * binom * pw;
      binom = binom * static_cast<double>(j + 1) / static_cast<double>(j + 1 - k);
      pw *= t0;
    }
  }
  const double scale = max_abs(params_);
  std::size_t order = 0;
  while (order < deg && std::abs(taylor[order]) <= 1e-9 * scale) ++order;
  const bool pole = std::abs(t0) > 1.0 - 1e-12;
  // At the poles 1 - |t| ~ |xi - p|^2 / 2, doubling the order.
  return static_cast<int>(pole ? 2 * order : order);
}

DensitySpec DensitySpec::scaled(double factor) const {
  std::vector<double> p = params_;
  if (family_ == DensityFamily::zonal_poly) {
    for (double& c : p) c *= factor;
  } else {
    p[0] *= factor;
  }
  return DensitySpec(family_, std::move(p), axis_);
}

MeasureSpec::MeasureSpec(std::size_t dim, std::vector<AtomSpec> atoms,
                         std::optional<DensitySpec> density, bool normalize)
    : dim_(dim), atoms_(std::move(atoms)), density_(std::move(density)),
      normalize_(normalize) {
  if (dim_ < 2) {
    throw Error(ErrorKind::invalid_dimension, "measure dim must be >= 2");
  }
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const std::string field = "atoms[" + std::to_string(i) + "]";
    if (atoms_[i].point.dim() != dim_) {
      throw Error(ErrorKind::validation, field + ".point has wrong dimension");
    }
    if (!std::isfinite(atoms_[i].weight) || atoms_[i].weight <= 0.0) {
      throw Error(ErrorKind::validation, field + ".weight must be positive");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (distance(atoms_[i].point, atoms_[j].point) <= kAtomMatchDistance) {
        throw Error(ErrorKind::validation, field + ".point duplicates atoms[" +
                                               std::to_string(j) + "].point");
      }
    }
  }
  if (density_ && density_->dim() != dim_) {
    throw Error(ErrorKind::validation, "density.axis has wrong dimension");
  }
  const double total = exact_mass();
  if (!(total > 0.0)) {
    throw Error(ErrorKind::validation, "measure must have positive total mass");
  }
  if (normalize_) {
    for (AtomSpec& a : atoms_) a.weight /= total;
    if (density_) density_ = density_->scaled(1.0 / total);
  }
}

double MeasureSpec::atom_mass() const {
  double s = 0.0;
  for (const AtomSpec& a : atoms_) s += a.weight;
  return s;
}

double MeasureSpec::exact_mass() const {
  return atom_mass() + (density_ ? density_->mass() : 0.0);
}

double total_mass(const MeasureSpec& m, const QuadratureRule& rule) {
  double mass = m.atom_mass();
  if (m.has_density()) {
    if (rule.dim != m.dim()) {
      throw Error(ErrorKind::dimension_mismatch,
                  "quadrature rule dimension does not match the measure");
    }
    const DensitySpec& g = *m.density();
    mass += integrate(rule, [&](std::span<const double> xi) { return g(xi); }).value;
  }
  return mass;
}

double atom_mass_at(const MeasureSpec& m, const SpherePoint& p) {
  for (const AtomSpec& a : m.atoms()) {
    if (a.point.dim() == p.dim() && distance(a.point, p) <= kAtomMatchDistance) {
      return a.weight;
    }
  }
  return 0.0;
}

bool complement_mass_positive(const MeasureSpec& m, const SpherePoint& p,
                              const QuadratureRule& rule) {
  return total_mass(m, rule) - atom_mass_at(m, p) > 1e-10;
}

namespace {

SpherePoint parse_point(const json& j, std::size_t dim, const std::string& field) {
  if (!j.is_array()) throw Error(ErrorKind::validation, field + " must be an array");
  std::vector<double> c;
  for (const json& v : j) {
    if (!v.is_number()) throw Error(ErrorKind::validation, field + " must hold numbers");
    c.push_back(v.get<double>());
  }
  if (c.size() != dim) {
    throw Error(ErrorKind::validation, field + " must have " + std::to_string(dim) +
                                           " coordinates");
  }
  try {
    return SpherePoint(std::move(c));
  } catch (const Error& e) {
    throw Error(ErrorKind::validation, field + ": " + e.what());
  }
}

double parse_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw Error(ErrorKind::validation, field + " must be a number");
  return j.get<double>();
}

}  // namespace

MeasureSpec parse_measure(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, std::string("malformed measure JSON at byte ") +
                                 std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::validation, "measure must be a JSON object");
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) {
    throw Error(ErrorKind::validation, "dim must be an integer");
  }
  const auto dim_value = doc["dim"].get<long long>();
  if (dim_value < 2) throw Error(ErrorKind::invalid_dimension, "dim must be >= 2");
  const auto dim = static_cast<std::size_t>(dim_value);

  std::vector<AtomSpec> atoms;
  if (doc.contains("atoms")) {
    const json& arr = doc["atoms"];
    if (!arr.is_array()) throw Error(ErrorKind::validation, "atoms must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string field = "atoms[" + std::to_string(i) + "]";
      if (!arr[i].is_object() || !arr[i].contains("point") || !arr[i].contains("weight")) {
        throw Error(ErrorKind::validation, field + " needs point and weight");
      }
      const double w = parse_number(arr[i]["weight"], field + ".weight");
      if (!(w > 0.0)) throw Error(ErrorKind::validation, field + ".weight must be positive");
      atoms.push_back({parse_point(arr[i]["point"], dim, field + ".point"), w});
    }
  }

  std::optional<DensitySpec> density;
  if (doc.contains("density") && !doc["density"].is_null()) {
    const json& d = doc["density"];
    if (!d.is_object() || !d.contains("family") || !d["family"].is_string()) {
      throw Error(ErrorKind::validation, "density.family must be a string");
    }
    const std::string fam = d["family"].get<std::string>();
    DensityFamily family;
    if (fam == "constant") {
      family = DensityFamily::constant;
    } else if (fam == "zonal-poly") {
      family = DensityFamily::zonal_poly;
    } else if (fam == "exp-zonal") {
      family = DensityFamily::exp_zonal;
    } else {
      throw Error(ErrorKind::validation, "density.family: unknown family '" + fam + "'");
    }
    std::vector<double> params;
    if (!d.contains("params") || !d["params"].is_array()) {
      throw Error(ErrorKind::validation, "density.params must be an array");
    }
    for (std::size_t i = 0; i < d["params"].size(); ++i) {
      params.push_back(parse_number(d["params"][i], "density.params[" + std::to_string(i) + "]"));
    }
    SpherePoint axis = SpherePoint::basis(dim, dim - 1);
    if (d.contains("axis")) {
      axis = parse_point(d["axis"], dim, "density.axis");
    } else if (family != DensityFamily::constant) {
      throw Error(ErrorKind::validation, "density.axis is required for zonal families");
    }
    density.emplace(family, std::move(params), std::move(axis));
  }

  bool normalize = false;
  if (doc.contains("normalize")) {
    if (!doc["normalize"].is_boolean()) {
      throw Error(ErrorKind::validation, "normalize must be a boolean");
    }
    normalize = doc["normalize"].get<bool>();
  }
  return MeasureSpec(dim, std::move(atoms), std::move(density), normalize);
}

std::string measure_to_json(const MeasureSpec& m) {
  json doc;
  doc["dim"] = m.dim();
  doc["atoms"] = json::array();
  for (const AtomSpec& a : m.atoms()) {
    doc["atoms"].push_back({{"point", a.point.coords()}, {"weight", a.weight}});
  }
  if (m.density()) {
    const DensitySpec& d = *m.density();
    doc["density"] = {{"family", to_string(d.family())},
                      {"params", d.params()},
                      {"axis", d.axis().coords()}};
  }
  doc["normalize"] = false;
  return doc.dump();
}

}  // namespace ihb
