#include "affectfuse/cli.hpp"

int main(int argc, char** argv) { return affectfuse::cli::run(argc, argv); }
