#include "cli.hpp"

int main(int argc, char** argv) { return rerm::cli::main(argc, argv); }
