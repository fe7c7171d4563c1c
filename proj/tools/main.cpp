#include "mhr/cli/commands.hpp"

int main(int argc, char** argv) {
  return mhr::cli::run(argc, argv);
}
