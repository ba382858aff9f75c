#include "magsense/cli/app.hpp"

int main(int argc, char** argv) { return magsense::cli::run(argc, argv); }
