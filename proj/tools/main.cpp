#include "stqp/cli.hpp"

int main(int argc, char** argv) { return stqp::cli::dispatch(argc, argv); }
