#include "rolltree/cli.hpp"

int main(int argc, char** argv) { return rolltree::run_cli(argc, argv); }
