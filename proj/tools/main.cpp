#include "wlap/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return wlap::run(argc, argv, std::cout, std::cerr); }
