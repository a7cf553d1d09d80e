#include <iostream>

#include "sddhopf/cli.hpp"

int main(int argc, char** argv) { return sddhopf::run_cli(argc, argv, std::cout, std::cerr); }
