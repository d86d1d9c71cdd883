#include <iostream>

#include "pia/cli.hpp"

int main(int argc, char** argv) {
    return pia::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
