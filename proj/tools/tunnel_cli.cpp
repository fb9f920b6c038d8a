#include "tunnel/cli.hpp"

int main(int argc, char** argv) { return tunnel::cli::run(argc, argv); }
