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

#include <csignal>
#include <iostream>

#include "cli/cli_app.hpp"

int main(int argc, char** argv) {
    auto on_signal = [](int) { unvd::cli::stop_requested().store(true); };
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    return unvd::cli::run(argc, argv, std::cout, std::cerr);
}
