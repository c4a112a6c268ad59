#include <iostream>

#include "regenpool/cli.hpp"

int main(int argc, char** argv) { return regenpool::cli::run_cli(argc, argv, std::cout, std::cerr); }
