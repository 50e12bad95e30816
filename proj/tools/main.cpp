#include "cli.hpp"

int main(int argc, char** argv) { return flexspec::cli::run(argc, argv); }
