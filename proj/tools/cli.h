// Copyright 2026 The rotecho Authors
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


#ifndef ROTECHO_TOOLS_CLI_H
#define ROTECHO_TOOLS_CLI_H

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

namespace rotecho::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitWarning = 2;

/// Entry point of the rotecho tool. Returns the process exit code.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

std::uint64_t fnv1a64(std::string_view data);

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const std::filesystem::path &path, const std::string &contents);

/// Shortest round-trip decimal form, independent of the locale.
std::string format_double(double v);

}  // namespace rotecho::cli

#endif
