#include <string>
#include <vector>

#include "dfs/cli.hpp"

int main(int argc, char** argv) {
  return dfs::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
