// Checker-only build: no search module is compiled or linked.
#include "nlv/cli/run.hpp"

int main(int argc, char** argv) { return nlv::cli::main_with_args(argc, argv, {}); }
