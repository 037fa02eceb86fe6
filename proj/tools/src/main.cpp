#include <iostream>

#include "smre/app/cli.hpp"

int main(int argc, char** argv) {
  return smre::app::cli_main(argc, argv, std::cout, std::cerr);
}
