#include "perfhom/cli.hpp"

int main(int argc, char** argv) { return perfhom::cli::run(argc, argv); }
