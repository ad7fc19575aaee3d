#include <iostream>

#include "vibronic/cli.hpp"

int main(int argc, char** argv) { return vibronic::cli::main(argc, argv, std::cout, std::cerr); }
