#include <string>
#include <vector>

#include "camal/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return camal::run_cli(args);
}
