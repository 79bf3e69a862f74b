#include <iostream>

#include "coherence/cli.hpp"

int main(int argc, char** argv) { return coherence::cli::main_entry(argc, argv, std::cout, std::cerr); }
