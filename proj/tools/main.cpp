#include <iostream>
#include <string>
#include <vector>

#include "caext/cli.h"

int main(int argc, char** argv)
{
  std::vector<std::string> args(argv + 1, argv + argc);
  return caext::run_cli(args, std::cout, std::cerr);
}
