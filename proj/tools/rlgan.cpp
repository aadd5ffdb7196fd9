#include <iostream>

#include "rlgan/cli/commands.hpp"

int main(int argc, char** argv) {
  return rlgan::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
