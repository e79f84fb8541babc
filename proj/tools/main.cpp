#include "cli.hpp"

int main(int argc, char** argv) { return fluxline::cli::run(argc, argv); }
