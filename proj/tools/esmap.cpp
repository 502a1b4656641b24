#include <iostream>

#include "esmap/cli.hpp"

int main(int argc, char** argv) { return esmap::cli::run(argc, argv, std::cout, std::cerr); }
