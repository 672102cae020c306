#include <iostream>

#include "lipent/cli.hpp"

int main(int argc, char** argv) { return lipent::run_cli(argc, argv, std::cout, std::cerr); }
