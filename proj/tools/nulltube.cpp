#include <iostream>

#include "nulltube/cli.hpp"

int main(int argc, char** argv) { return nulltube::run_cli(argc, argv, std::cout, std::cerr); }
