#include <iostream>

#include "modalnet/cli.hpp"

int main(int argc, char** argv) {
  return mnet::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
