#include <iostream>

#include "sirtimes/cli.hpp"

int main(int argc, char** argv) { return sirtimes::run_cli(argc, argv, std::cout, std::cerr); }
