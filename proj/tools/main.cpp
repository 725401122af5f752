#include "cli.hpp"

int main(int argc, char** argv) { return superdiff::cli::run(argc, argv); }
