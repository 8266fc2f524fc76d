#include <iostream>

#include "tdtf_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tdtf::cli::run(args, std::cout, std::cerr);
}
