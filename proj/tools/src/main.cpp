#include "ecdc_cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ecdc::cli::run(argc, argv, std::cout, std::cerr); }
