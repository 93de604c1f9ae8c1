#include "clozeqa/cli.h"

int main(int argc, char** argv) { return clozeqa::cli::run(argc, argv); }
