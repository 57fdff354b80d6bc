#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ihb/measures.hpp"

namespace ihb::test {

inline MeasureSpec point_mass(std::vector<double> at, double w = 1.0) {
  const std::size_t d = at.size();
  return MeasureSpec(d, {AtomSpec{SpherePoint(std::move(at)), w}}, std::nullopt);
}

inline MeasureSpec uniform_density(std::size_t dim, double total = 1.0) {
  return MeasureSpec(dim, {},
                     DensitySpec(DensityFamily::constant, {total / sphere_area(dim)},
                                 SpherePoint::basis(dim, dim - 1)));
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// Scratch file under the system temp directory, removed on destruction.
class TempFile {
 public:
  TempFile(const std::string& name, const std::string& contents)
      : path_(std::filesystem::temp_directory_path() / ("ihb_test_" + name)) {
    std::ofstream(path_, std::ios::binary) << contents;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace ihb::test
