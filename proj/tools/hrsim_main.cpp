#include "hrsim/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return hrsim::run_cli(argc, argv, std::cout, std::cerr);
}
