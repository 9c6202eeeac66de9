#include "sba/cli.hpp"

int main(int argc, char** argv) { return sba::cli::run(argc, argv); }
