#include "tropescope/cli.hpp"

int main(int argc, char** argv) { return tropescope::cli::main(argc, argv); }
