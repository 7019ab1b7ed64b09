#include <iostream>

#include "quantcsp/cli.hpp"

int main(int argc, char **argv) { return quantcsp::cli::dispatch(argc, argv, std::cout, std::cerr); }
