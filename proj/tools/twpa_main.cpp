#include "twpa/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return twpa::cli::run(argc, argv, std::cout, std::cerr); }
