#include "cli.hpp"

int main(int argc, char** argv) { return clocksync::cli_main(argc, argv); }
