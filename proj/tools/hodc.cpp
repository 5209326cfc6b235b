#include <iostream>

#include "hodc/cli.hpp"

int main(int argc, char** argv) { return hodc::run_cli(argc, argv, std::cout, std::cerr); }
