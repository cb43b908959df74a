#include <iostream>

#include "kelly/cli.hpp"

int main(int argc, char** argv) {
  return kelly::cli::run(argc, argv, std::cout, std::cerr);
}
