#include "fractaldim/cli.hpp"

int main(int argc, char** argv) { return fractaldim::run_cli(argc, argv); }
