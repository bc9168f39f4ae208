#include "hgm/cli.hpp"

int main(int argc, char** argv) { return hgm::cli_main(argc, argv); }
