#include <iostream>
#include <string>
#include <vector>

#include "flowsynth/benchcli/bench.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return flowsynth::cli(args, std::cout, std::cerr);
}
