#include "cli.hpp"

int main(int argc, char** argv) { return gridsched::cli::main_entry(argc, argv); }
