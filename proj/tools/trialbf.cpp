#include <iostream>

#include "trialbf/cli.hpp"

int main(int argc, char** argv) { return trialbf::parse_and_run(argc, argv, std::cout, std::cerr); }
