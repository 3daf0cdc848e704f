#include <iostream>

#include "asuman/cli.hpp"

int main(int argc, char** argv) {
    return asuman::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
