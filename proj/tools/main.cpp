#include <iostream>
#include <string>
#include <vector>

#include "rankzip/cli.hpp"

int main(int argc, char** argv) {
    return rankzip::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
