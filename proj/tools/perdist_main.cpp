#include <iostream>
#include <string>
#include <vector>

#include "perdist/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return perdist::run_cli(args, std::cout, std::cerr);
}
