#include "cli.hpp"

int main(int argc, char** argv) { return nlda::cli::run(argc, argv); }
