#include <iostream>
#include <string>
#include <vector>

#include "rvs_cli/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rvs::cli::runMain(args, std::cout, std::cerr);
}
