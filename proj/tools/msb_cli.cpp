#include <iostream>

#include "msb/experiments.hpp"

int main(int argc, char** argv) { return msb::cli::run(argc, argv, std::cout, std::cerr); }
