#include <iostream>
#include <string>
#include <vector>

#include "cfsim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cfsim::cli_dispatch(args, std::cout, std::cerr);
}
