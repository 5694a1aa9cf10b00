#include <iostream>

#include "swipt/cli.hpp"

int main(int argc, char** argv) {
  return swipt::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
