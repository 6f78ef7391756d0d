#include "fadforge/campaigns.hpp"

int main(int argc, char** argv) { return fadforge::cli(argc, argv); }
