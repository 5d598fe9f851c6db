#include <iostream>

#include "disambig/cli.hpp"

int main(int argc, char** argv) { return disambig::cli::main(argc, argv, std::cout, std::cerr); }
