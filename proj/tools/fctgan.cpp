#include <malloc.h>

#include <iostream>

#include "fctgan/cli/cli.hpp"

int main(int argc, char** argv) {
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  return fctgan::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
