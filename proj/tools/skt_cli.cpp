#include <iostream>

#include "skt/commands.hpp"

int main(int argc, char** argv) { return skt::cli_main(argc, argv, std::cout, std::cerr); }
