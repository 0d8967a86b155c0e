#include <iostream>

#include "asdrc/cli.hpp"

int main(int argc, char** argv) { return asdrc::cli::run(argc, argv, std::cout, std::cerr); }
