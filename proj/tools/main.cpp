#include <iostream>

#include "hadinv/cli.hpp"

int main(int argc, char** argv) {
  return hadinv::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout,
                         std::cerr);
}
