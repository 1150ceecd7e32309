#include <iostream>

#include "riskbench/cli.hpp"

int main(int argc, char** argv) { return riskbench::run_cli(argc, argv, std::cout, std::cerr); }
