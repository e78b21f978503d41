#include <iostream>

#include "culd/cli.hpp"

int main(int argc, char** argv) { return culd::cli_main(argc, argv, std::cout, std::cerr); }
