#include <vector>

#include "curvlab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return curvlab::run_cli(args);
}
