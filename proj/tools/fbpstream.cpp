#include <iostream>

#include "fbpstream/cli.hpp"

int main(int argc, char** argv) {
  return fbpstream::run_cli(argc, argv, std::cout, std::cerr);
}
