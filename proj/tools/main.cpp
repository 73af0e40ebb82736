#include "commands.hpp"

int main(int argc, char** argv) { return monolab::cli::run(argc, argv); }
