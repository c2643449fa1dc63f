#include <iostream>
#include <string>
#include <vector>

#include "napood/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return napood::run_cli(args, std::cout, std::cerr);
}
