#include "swingid/cli.hpp"

int main(int argc, char** argv) { return swingid::cli::run(argc, argv); }
