// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "isac/cli.hpp"

int main(int argc, char** argv) { return isac::run_cli(argc, argv, std::cout, std::cerr); }
