#include <iostream>

#include "isodist/cli.hpp"

int main(int argc, char** argv) { return isodist::run_cli(argc, argv, std::cout, std::cerr); }
