#include "drkit/cli.hpp"

int main(int argc, char** argv) { return drkit::cli::run(argc, argv); }
