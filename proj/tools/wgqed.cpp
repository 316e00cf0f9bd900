#include "wgqed/cli.hpp"

int main(int argc, char** argv) { return wgqed::cli::run_cli(argc, argv); }
