#include "svq/cli.hpp"

int main(int argc, char** argv) {
    return svq::cli::run(argc, argv);
}
