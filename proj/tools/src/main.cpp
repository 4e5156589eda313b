#include <iostream>

#include "hexwar_tools/commands.hpp"

int main(int argc, char** argv) {
  return hexwar::tools::run_cli(argc, argv, std::cout, std::cerr);
}
