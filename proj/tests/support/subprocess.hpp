#pragma once

// Minimal helper to exec the CLI binary and capture stdout + exit status.

#include <array>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace test_support {

struct CommandResult {
  int status = -1;
  std::string output;
};

// Path of the binary under test, supplied by CMake as --bin=<path> (see the
// custom main in the test sources) with a BEEPSIM_BIN fallback.
inline std::string& cli_path() {
  static std::string path = [] {
    const char* env = std::getenv("BEEPSIM_BIN");
    return std::string(env ? env : "");
  }();
  return path;
}

inline CommandResult run_cli(const std::string& args) {
  if (cli_path().empty()) {
    throw std::runtime_error("CLI binary path not set (pass --bin=<path> or BEEPSIM_BIN)");
  }
  const std::string cmd = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  CommandResult result;
  std::array<char, 4096> buf;
  while (std::size_t got = std::fread(buf.data(), 1, buf.size(), pipe)) {
    result.output.append(buf.data(), got);
  }
  const int rc = pclose(pipe);
  result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return result;
}

// Strips --bin=<path> out of argv before doctest sees it.
inline void extract_cli_path(int& argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--bin=", 0) == 0) {
      cli_path() = arg.substr(6);
      for (int j = i; j + 1 < argc; ++j) argv[j] = argv[j + 1];
      --argc;
      return;
    }
  }
}

}  // namespace test_support
