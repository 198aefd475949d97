#include "backflow/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return backflow::cli::main_entry(argc, argv, std::cout, std::cerr); }
