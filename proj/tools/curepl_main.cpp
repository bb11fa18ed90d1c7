#include "curepl/cli.hpp"

int main(int argc, char** argv) { return curepl::cli::cli_dispatch(argc, argv); }
