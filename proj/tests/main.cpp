#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "ihb/parallel.hpp"

int main(int argc, char** argv) {
  ihb::parallel::configure_from_env();
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
