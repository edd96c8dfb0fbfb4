#include "msgest/cli.hpp"

int main(int argc, char** argv) {
    return msgest::run_cli(std::vector<std::string>(argv, argv + argc));
}
