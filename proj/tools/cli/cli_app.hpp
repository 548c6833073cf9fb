// Copyright 2026-present the unvd project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "unvd/analytics/experiment.hpp"
#include "unvd/chain/fixture_set.hpp"

namespace unvd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

enum class Format { table, ndjson };

/// Runs the `unvd` command line. Output goes to `out`, diagnostics and usage
/// text to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Set by SIGINT/SIGTERM; long-running subcommands poll it.
std::atomic<bool>& stop_requested();

/// Every token of a fixture directory, labeled by its contract address.
std::vector<analytics::LabeledMedia> load_fixture_media(const chain::FixtureSet& set);

}  // namespace unvd::cli
