#include <iostream>
#include <string>
#include <vector>

#include "feller/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return feller::cli::run(args, std::cout, std::cerr);
}
