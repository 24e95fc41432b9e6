#include "fbl/cli.hpp"

int main(int argc, char** argv) { return fbl::cli::run(argc, argv); }
