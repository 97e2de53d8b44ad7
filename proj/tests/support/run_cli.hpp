//
// Copyright 2026 The trustml Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace trustml::testing {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline std::string shell_quote(const std::string& arg) {
  std::string quoted = "'";
  for (char ch : arg) {
    if (ch == '\'') quoted += "'\\''";
    else quoted += ch;
  }
  quoted += "'";
  return quoted;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  std::ostringstream content;
  content << file.rdbuf();
  return content.str();
}

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  file << content;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "trustml_tests" / name;
  std::filesystem::create_directories(dir);
  return dir;
}

/// Runs the CLI binary with the given arguments, capturing stdout and
/// stderr separately via a /bin/sh redirect. `env_prefix` may carry
/// VAR=value assignments.
inline CliResult run_cli(const std::string& binary,
                         const std::vector<std::string>& args,
                         const std::string& scratch_name = "cli",
                         const std::string& env_prefix = "") {
  const auto dir = scratch_dir(scratch_name);
  const auto out_path = dir / "stdout.txt";
  const auto err_path = dir / "stderr.txt";

  std::string command = env_prefix.empty() ? "" : env_prefix + " ";
  command += shell_quote(binary);
  for (const auto& arg : args) command += " " + shell_quote(arg);
  command += " > " + shell_quote(out_path.string());
  command += " 2> " + shell_quote(err_path.string());

  const int status = std::system(command.c_str());

  CliResult result;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  if (status == -1) {
    result.exit_code = -1;
  } else if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else {
    result.exit_code = 128;
  }
  return result;
}

}  // namespace trustml::testing
