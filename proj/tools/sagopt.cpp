#include <iostream>

#include "sagopt/cli.hpp"

int main(int argc, char** argv) { return sagopt::cli::run_cli(argc, argv, std::cout, std::cerr); }
