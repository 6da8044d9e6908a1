#include "cmforge/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cmforge::run_cli(argc, argv, std::cout, std::cerr); }
