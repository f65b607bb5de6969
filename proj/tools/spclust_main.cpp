#include "spclust/cli.hpp"

int main(int argc, char** argv) { return spclust::cli::run_cli(argc, argv); }
