#pragma once

// Shared helpers for the test binaries: CLI invocation through popen,
// scratch files, and a few small matrix builders.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "qtp/linalg.hpp"
#include "qtp/types.hpp"

namespace testutil {

struct CliResult {
  int code = -1;
  std::string out;
};

// Runs the qtp binary through the shell.  `redirect` is appended verbatim,
// so callers choose whether stderr is merged ("2>&1") or dropped.
inline CliResult run_shell(const std::string& cmd) {
  CliResult r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline CliResult run_cli(const std::string& args,
                         const std::string& redirect = "2>/dev/null") {
  return run_shell(std::string(QTP_CLI_PATH) + " " + args + " " + redirect);
}

class TempFile {
 public:
  explicit TempFile(const std::string& tag) {
    static int counter = 0;
    path_ = (std::filesystem::temp_directory_path() /
             ("qtp_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++)))
                .string();
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline qtp::Matrix pauli_x() {
  qtp::Matrix m = qtp::Matrix::Zero(2, 2);
  m(0, 1) = 1;
  m(1, 0) = 1;
  return m;
}

inline qtp::Matrix pauli_z() {
  qtp::Matrix m = qtp::Matrix::Zero(2, 2);
  m(0, 0) = 1;
  m(1, 1) = -1;
  return m;
}

// iσ_y = ZX, the fourth correction of the two-dimensional decoding table.
inline qtp::Matrix i_sigma_y() {
  qtp::Matrix m = qtp::Matrix::Zero(2, 2);
  m(0, 1) = 1;
  m(1, 0) = -1;
  return m;
}

inline qtp::Matrix hadamard() {
  qtp::Matrix m(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  m << r, r, r, -r;
  return m;
}

inline qtp::Matrix cnot() {
  qtp::Matrix m = qtp::Matrix::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = 1;
  m(2, 3) = 1;
  m(3, 2) = 1;
  return m;
}

}  // namespace testutil
