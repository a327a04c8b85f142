#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  return obg::tools::run_cli(argc, argv, std::cout, std::cerr);
}
