#include "qjh/cli.hpp"

int main(int argc, char** argv) { return qjh::cli::run(argc, argv); }
