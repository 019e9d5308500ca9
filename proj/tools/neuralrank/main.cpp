#include <iostream>

#include "neuralrank/cli.hpp"

int main(int argc, char** argv) { return neuralrank::cli::run(argc, argv, std::cout, std::cerr); }
