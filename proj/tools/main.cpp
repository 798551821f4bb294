#include "cli.hpp"

int main(int argc, char** argv) { return fixsynth::cli::dispatch(argc, argv); }
