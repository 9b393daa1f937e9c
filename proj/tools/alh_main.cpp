#include "alh/cli.hpp"

int main(int argc, char** argv) { return alh::cli_main(argc, argv); }
