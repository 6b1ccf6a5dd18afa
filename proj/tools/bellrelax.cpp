#include "bellrelax/cli.hpp"

int main(int argc, char** argv) { return bellrelax::run_cli(argc, argv); }
