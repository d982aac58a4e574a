#include "uavswarm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return uavswarm::run_cli(argc, argv, std::cout, std::cerr); }
