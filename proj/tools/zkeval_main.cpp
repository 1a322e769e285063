#include "zkeval/cli.hpp"

int main(int argc, char** argv) { return zkeval::cli::run(argc, argv); }
