#include <iostream>

#include "rankone/cli.hpp"

int main(int argc, char** argv) { return rankone::run_cli(argc, argv, std::cout, std::cerr); }
