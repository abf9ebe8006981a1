#include "fluxlab/runner.h"

int main(int argc, char** argv) { return fluxlab::cli_main(argc, argv); }
