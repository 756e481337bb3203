#include "pursuit/scenario.hpp"

int main(int argc, char** argv) { return pursuit::cli_main(argc, argv); }
