#include "commands.hpp"

int main(int argc, char** argv) { return tvspec::cli::run_cli(argc, argv); }
