#include <iostream>

#include "dsketch/cli.hpp"

int main(int argc, char** argv) { return dsketch::cli::run(argc, argv, std::cout, std::cerr); }
