#include "svloc/cli.hpp"

int main(int argc, char** argv) { return svloc::cli::run_cli(argc, argv); }
