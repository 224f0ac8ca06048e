#include <iostream>
#include <string>
#include <vector>

#include "vcalg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vcalg::cli::run_cli(args, std::cout);
}
