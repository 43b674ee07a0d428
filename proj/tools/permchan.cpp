#include "permchan/cli.hpp"

int main(int argc, char** argv) { return permchan::cli::main_entry(argc, argv); }
