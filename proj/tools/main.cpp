#include "hiter/cli.hpp"

int main(int argc, char** argv) { return hiter::cli_main(argc, argv); }
