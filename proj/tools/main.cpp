#include <string>
#include <vector>

#include "qcflow/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qcflow::cli::run_command(args);
}
