#include "thinflow/cli.hpp"

int main(int argc, char** argv) { return thinflow::run_cli(argc, argv); }
