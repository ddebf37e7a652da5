#include <iostream>
#include <string>
#include <vector>

#include <geohub/cli.hpp>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return geohub::run_cli(args, std::cout, std::cerr);
}
