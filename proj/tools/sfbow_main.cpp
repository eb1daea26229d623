#include <iostream>

#include "sfbow/cli.hpp"

int main(int argc, char** argv) { return sfbow::cli::run(argc, argv, std::cout, std::cerr); }
