#include <iostream>

#include "stim/cli.hpp"

int main(int argc, char** argv) { return stim::cli::run(argc, argv, std::cout, std::cerr); }
