#include "cli.h"

int main(int argc, char** argv) { return decole::RunCli(argc, argv); }
