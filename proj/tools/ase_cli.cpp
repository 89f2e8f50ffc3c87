#include <iostream>
#include <string>
#include <vector>

#include "ase/cli.hpp"

int main(int argc, char** argv) {
    return ase::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
