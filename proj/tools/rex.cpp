#include <iostream>

#include "rex/cli.hpp"

int main(int argc, char** argv) {
  return rex::cli::run(argc, argv, std::cout, std::cerr);
}
