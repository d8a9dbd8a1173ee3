#include "arnnsci/cli.hpp"

int main(int argc, char** argv) { return arnnsci::cli::main(argc, argv); }
