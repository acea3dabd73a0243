#include <string>
#include <vector>

#include "foodsig/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return foodsig::run_cli(args);
}
