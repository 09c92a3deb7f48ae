#include <iostream>

#include "camforge/cli.hpp"

int main(int argc, char** argv) {
    return camforge::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
