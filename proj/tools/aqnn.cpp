#include <iostream>

#include "aqnn/cli.hpp"

int main(int argc, char** argv) { return aqnn::cli::run(argc, argv, std::cout, std::cerr); }
