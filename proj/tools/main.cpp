#include "cli.hpp"

int main(int argc, char** argv) { return treeweave::cli::run_command(argc, argv); }
