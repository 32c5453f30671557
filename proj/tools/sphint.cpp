#include <iostream>

#include "sphint_cli.hpp"

int main(int argc, char** argv) { return sphint::cli::main_cli(argc, argv, std::cout, std::cerr); }
