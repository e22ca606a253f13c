#include <iostream>

#include "enq/cli.hpp"

int main(int argc, char** argv) { return enq::cli::run(argc, argv, std::cout, std::cerr); }
