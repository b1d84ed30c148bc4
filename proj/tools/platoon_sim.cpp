#include <iostream>

#include "platoon/cli.hpp"

int main(int argc, char** argv)
{
    return platoon::cli::run_cli(argc, argv, std::cout, std::cerr);
}
