#include "cli.hpp"

int main(int argc, char** argv) { return s2spm::cli::run(argc, argv); }
