#include <iostream>

#include "vcs/cli.hpp"

int main(int argc, char** argv) { return vcs::cli::run(argc, argv, std::cout, std::cerr); }
