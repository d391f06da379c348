#include <string>
#include <vector>

#include "stairs/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return stairs::run_cli(args);
}
