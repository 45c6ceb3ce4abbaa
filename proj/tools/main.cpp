#include <string>
#include <vector>

#include "mlmm/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mlmm::cli::run(args);
}
