#include "arcsine_reset/cli.hpp"

int main(int argc, char** argv) { return arcsine_reset::cli::run(argc, argv); }
