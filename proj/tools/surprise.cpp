#include <string>
#include <vector>

#include "surprise/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return surprise::cli::run_cli(args);
}
