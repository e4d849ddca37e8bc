#include "cli.hpp"

int main(int argc, char** argv) { return obl::cli::run(argc, argv); }
