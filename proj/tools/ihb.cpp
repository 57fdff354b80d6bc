#include <iostream>

#include "cli.hpp"
#include "ihb/parallel.hpp"

int main(int argc, char** argv) {
  ihb::parallel::configure_from_env();
  return ihb::cli::run(argc, argv, std::cout, std::cerr);
}
