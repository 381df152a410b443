#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "prtitle/cli.hpp"

int main(int argc, char** argv) {
  // stdout carries command output; logs go to stderr.
  spdlog::set_default_logger(spdlog::stderr_color_mt("prtitle"));
  return prtitle::cli_main(argc, argv, std::cout, std::cerr);
}
