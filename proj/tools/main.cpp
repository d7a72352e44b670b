#include "satfuse/cli.hpp"

int main(int argc, char** argv) {
    return satfuse::cli::run(argc, argv);
}
