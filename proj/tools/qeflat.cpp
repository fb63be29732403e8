#include <iostream>

#include "qeflat/cli.hpp"

int main(int argc, char** argv) {
  return qeflat::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
