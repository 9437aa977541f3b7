// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "aabsp_cli/app.hpp"

int main(int argc, char** argv) { return aabsp::cli::run(argc, argv, std::cout, std::cerr); }
