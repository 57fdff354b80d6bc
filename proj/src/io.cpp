#include "ihb/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ihb/error.hpp"

namespace ihb {

KernelParams parse_params(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.byte, std::string("malformed params JSON at byte ") +
                                 std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::validation, "params must be a JSON object");
  if (!doc.contains("field") || !doc["field"].is_string()) {
    throw Error(ErrorKind::validation, "field must be \"real\" or \"complex\"");
  }
  const std::string field = doc["field"].get<std::string>();
  Field f;
  if (field == "real") {
    f = Field::real;
  } else if (field == "complex") {
    f = Field::complex;
  } else {
    throw Error(ErrorKind::validation, "field must be \"real\" or \"complex\", got '" + field + "'");
  }
  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw Error(ErrorKind::validation, "n must be an integer");
  }
  if (!doc.contains("lambda") || !doc["lambda"].is_number()) {
    throw Error(ErrorKind::validation, "lambda must be a number");
  }
  const auto n = doc["n"].get<long long>();
  if (n < 1 || n > 64) throw Error(ErrorKind::invalid_dimension, "n out of range");
  return KernelParams(f, static_cast<int>(n), doc["lambda"].get<double>());
}

json params_to_json(const KernelParams& p) {
  return json{{"field", to_string(p.field)}, {"n", p.n}, {"lambda", p.lambda}};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_csv_floats(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty() && item.front() == '+') item.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw Error(ErrorKind::argument, "not a comma-separated list of numbers: '" +
                                           std::string(text) + "'");
    }
    out.push_back(v);
    pos = end + 1;
  }
  return out;
}

json vector_to_json(std::span<const double> v) {
  json arr = json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) return "nan";
  std::string out(buf, ptr);
  if (std::isfinite(v) && out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

}  // namespace ihb
