#include <string>
#include <vector>

#include "rvseg/cli.hpp"

int main(int argc, char** argv) { return rvseg::cli::run(std::vector<std::string>(argv, argv + argc)); }
