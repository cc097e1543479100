#include "fvclaw/apps.hpp"

int main(int argc, char** argv) { return fvclaw::cli_main(argc, argv); }
