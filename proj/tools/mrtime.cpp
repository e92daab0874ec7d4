#include <iostream>
#include <string>
#include <vector>

#include "mrtime/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mrtime::cli::run(args, std::cout, std::cerr);
}
