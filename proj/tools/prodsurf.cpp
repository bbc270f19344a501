#include <iostream>

#include "prodsurf/cli.hpp"

int main(int argc, char** argv) {
  return prodsurf::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
