#include "invscheme/harness.hpp"

int main(int argc, char** argv) { return invscheme::cli_main(argc, argv); }
