#include <iostream>

#include "mmdnav/cli.hpp"

int main(int argc, char** argv) { return mmdnav::cli::main(argc, argv, std::cout, std::cerr); }
