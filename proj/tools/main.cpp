#include <iostream>

#include "sonicprint/cli.hpp"

int main(int argc, char** argv) { return sonicprint::run_cli(argc, argv, std::cout, std::cerr); }
