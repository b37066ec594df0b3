#include <iostream>

#include "nhpp/cli.hpp"

int main(int argc, char** argv) {
    return nhpp::cli::run(argc, argv, std::cout, std::cerr);
}
