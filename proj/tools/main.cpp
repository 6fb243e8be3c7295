#include <iostream>

#include "pcw/cli.hpp"

int main(int argc, char** argv) { return pcw::run_cli(argc, argv, std::cout, std::cerr); }
