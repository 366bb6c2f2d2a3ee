#include <iostream>

#include "bikeshare/cli.hpp"

int main(int argc, char** argv) {
    return bikeshare::run_cli(argc, argv, std::cout, std::cerr);
}
