#include "cli.hpp"

int main(int argc, char** argv) { return codesign::cli::run(argc, argv); }
