#include "nlv/cli/search_backend.hpp"

int main(int argc, char** argv) { return nlv::cli::main_with_args(argc, argv, nlv::cli::search_backend()); }
