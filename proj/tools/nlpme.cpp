#include "nlpme/cli.hpp"

int main(int argc, char** argv) { return nlpme::cli::run_cli(argc, argv); }
