#include "dualport/cli.hpp"

int main(int argc, char** argv) { return dualport::cli::run(argc, argv); }
