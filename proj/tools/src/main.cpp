#include <iostream>

#include "spmrf/tools/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spmrf::tools::run_cli(args, std::cout, std::cerr);
}
