#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return fodgmm::cli::main(argc, argv, std::cout, std::cerr);
}
