#include "resact/cli.hpp"

int main(int argc, char** argv) { return resact::cli::run_cli(argc, argv); }
