#include "ghostsim/cli.hpp"

int main(int argc, char** argv) { return ghostsim::cli::dispatch(argc, argv); }
