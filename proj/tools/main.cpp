#include "multiflow/cli.hpp"

int main(int argc, char** argv) { return multiflow::run_cli(argc, argv); }
