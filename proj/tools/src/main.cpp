#include <iostream>

#include "oscar/cli/cli.hpp"

int main(int argc, char** argv) { return oscar::cli::run(argc, argv, std::cout, std::cerr); }
