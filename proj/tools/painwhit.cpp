#include "painwhit/cli.hpp"

int main(int argc, char** argv) { return painwhit::cli::main_entry(argc, argv); }
