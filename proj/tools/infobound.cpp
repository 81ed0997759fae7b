#include <string>
#include <vector>

#include "infobound/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return infobound::cli::run_cli(args);
}
