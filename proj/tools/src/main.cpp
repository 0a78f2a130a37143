#include <iostream>
#include <string>
#include <vector>

#include "bcsfit_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bcsfit::cli::run(args, std::cout, std::cerr);
}
