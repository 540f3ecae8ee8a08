#include <iostream>

#include "sroc/cli.hpp"

int main(int argc, char** argv) { return sroc::cli::main(argc, argv, std::cout, std::cerr); }
