#include "bykov/cli.hpp"

int main(int argc, char** argv) { return bykov::cli::dispatch(argc, argv); }
