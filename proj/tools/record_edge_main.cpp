#include <iostream>

#include "record_edge/cli.hpp"

int main(int argc, char** argv) {
  return record_edge::cli::run(argc, argv, std::cout, std::cerr);
}
