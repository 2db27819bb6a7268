#include <iostream>

#include "daelab/cli/cli.hpp"

int main(int argc, char** argv) { return daelab::cli::run(argc, argv, std::cout, std::cerr); }
