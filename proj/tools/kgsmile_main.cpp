#include "kgsmile/cli.hpp"

int main(int argc, char** argv) { return kgsmile::run_cli(argc, argv); }
