#pragma once

#include <iosfwd>

namespace ihb::cli {

/// Exit codes: 0 computed or verified, 1 violation or classification
/// mismatch, 2 usage or input error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ihb::cli
