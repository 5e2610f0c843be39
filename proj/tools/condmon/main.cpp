#include <iostream>

#include "condmon/cli/commands.hpp"

int main(int argc, char** argv) { return condmon::cli::run(argc, argv, std::cout, std::cerr); }
