#include "rboost/cli.hpp"

int main(int argc, char** argv) { return rboost::cli::dispatch(argc, argv); }
