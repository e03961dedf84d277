#include "exitspec/cli_app.hpp"

int main(int argc, char** argv) { return exitspec::run_cli(argc, argv); }
