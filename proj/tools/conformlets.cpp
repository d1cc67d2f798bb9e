#include <iostream>

#include "conformlets/cli.hpp"

int main(int argc, char** argv) {
  return conformlets::cli::run(argc, argv, std::cout, std::cerr);
}
