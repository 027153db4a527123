#include "dressed/scenario.hpp"

int main(int argc, char** argv) { return dressed::run_cli(argc, argv); }
