#include <string>
#include <vector>

#include "gapmode/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gapmode::run_command(args);
}
