#include "dfrcsg/cli.hpp"

int main(int argc, char** argv) { return dfrcsg::cli::run(argc, argv); }
