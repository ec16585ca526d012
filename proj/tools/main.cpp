#include <iostream>

#include "dsel/cli.hpp"

int main(int argc, char** argv) {
  return dsel::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
