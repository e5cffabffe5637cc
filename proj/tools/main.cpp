#include <iostream>
#include <string>
#include <vector>

#include "adelic/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return adelic::run(args, std::cout, std::cerr);
}
