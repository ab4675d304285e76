#include "heattrack/cli.hpp"

int main(int argc, char** argv) { return heattrack::cli::main_entry(argc, argv); }
