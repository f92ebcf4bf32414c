#include "mpfem/cli.hpp"

int main(int argc, char** argv) { return mpfem::run_cli(argc, argv); }
