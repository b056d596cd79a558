#include <iostream>
#include <string>
#include <vector>

#include "idemkit/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return idemkit::cli::run(std::move(args), std::cout, std::cerr);
}
