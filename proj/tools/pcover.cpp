#include "pcover/cli.hpp"

int main(int argc, char** argv) { return pcover::cli::run(argc, argv); }
