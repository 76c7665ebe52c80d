#include "funiform/cli.hpp"

int main(int argc, char** argv) { return funiform::cli::run(argc, argv); }
