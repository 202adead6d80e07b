#include "fracspde/cli.hpp"

int main(int argc, char** argv) { return fracspde::run_cli(argc, argv); }
