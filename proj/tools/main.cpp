#include <iostream>

#include "nspbound/cli.hpp"

int main(int argc, char** argv) {
  return nspbound::cli::run(argc, argv, std::cout, std::cerr);
}
