#include "langevin/harness.hpp"

int main(int argc, char** argv) { return langevin::run_cli(argc, argv); }
