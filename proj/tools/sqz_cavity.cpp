#include <iostream>
#include <string>
#include <vector>

#include "sqz/cli.hpp"

int main(int argc, char** argv) {
  return sqz::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
