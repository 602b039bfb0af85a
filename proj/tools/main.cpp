#include <iostream>

#include "caloron/cli.hpp"

int main(int argc, char** argv) { return caloron::cli::run(argc, argv, std::cout, std::cerr); }
