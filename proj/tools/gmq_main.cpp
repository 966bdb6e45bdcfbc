#include <gmq/cli.hpp>

#include <iostream>

int main(int argc, char** argv) { return gmq::run_cli(argc, argv, std::cout, std::cerr); }
