#include "wmgf/cli.hpp"

int main(int argc, char** argv) { return wmgf::run_cli(argc, argv); }
