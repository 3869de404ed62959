#include <iostream>

#include "cpcsys/cli.hpp"

int main(int argc, char** argv) {
  return cpcsys::run_cli(argc, argv, std::cout, std::cerr);
}
