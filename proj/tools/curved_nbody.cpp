#include <curved_nbody/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return curved_nbody::cli::run(argc, argv, std::cout, std::cerr); }
