#include <iostream>

#include "cohomlab/cli.hpp"

int main(int argc, char** argv) { return cohomlab::run_cli(argc, argv, std::cout, std::cerr); }
