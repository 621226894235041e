#include <iostream>

#include "xpv/cli.hpp"

int main(int argc, char** argv) { return xpv::run(argc, argv, std::cout, std::cerr); }
