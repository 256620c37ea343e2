#include "cli.hpp"

int main(int argc, char** argv) { return convexsdp::cli::run(argc, argv); }
