#include <iostream>

#include "impute/config.hpp"

int main(int argc, char** argv) { return impute::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
