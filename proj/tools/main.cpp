#include <iostream>

#include "spectral_cantor/cli.hpp"

int main(int argc, char** argv) { return spectral_cantor::run_cli(argc, argv, std::cout, std::cerr); }
