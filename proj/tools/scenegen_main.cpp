#include "scenegen/cli.hpp"

int main(int argc, char** argv) { return scenegen::cli::run(argc, argv); }
