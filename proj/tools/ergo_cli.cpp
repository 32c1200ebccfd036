#include <iostream>
#include <string>
#include <vector>

#include "ergo/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ergo::run_cli(args, std::cout, std::cerr);
}
