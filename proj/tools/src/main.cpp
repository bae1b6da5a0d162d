#include <iostream>
#include <string>
#include <vector>

#include "ionxy_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ionxy::cli::run(args, std::cout, std::cerr);
}
