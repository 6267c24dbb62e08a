#include "cchain/cli.hpp"

int main(int argc, char** argv) { return cchain::run_cli(argc, argv); }
