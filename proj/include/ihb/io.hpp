#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ihb/kernels.hpp"

namespace ihb {

using json = nlohmann::ordered_json;

/// {"field": "real"|"complex", "n": int, "lambda": float}
KernelParams parse_params(std::string_view text);
json params_to_json(const KernelParams& p);

std::string read_text_file(const std::string& path);

/// "0.1,0.2,-1" -> {0.1, 0.2, -1}; throws ErrorKind::argument on junk.
std::vector<double> parse_csv_floats(std::string_view text);

json vector_to_json(std::span<const double> v);

/// Pretty-printed with a trailing newline; numbers round-trip.
std::string dump(const json& j);

/// %.17g, independent of the global locale.
std::string format_double(double v);

}  // namespace ihb
