#include <string>
#include <vector>

#include "pshoot/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pshoot::cli_run(args);
}
