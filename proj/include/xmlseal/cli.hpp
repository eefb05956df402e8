// Copyright 2026 The xmlseal Authors
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

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace xmlseal::cli {

/// Process exit statuses.
enum ExitStatus : int {
  kOk = 0,
  /// Invalid signature or failed decryption.
  kRejected = 1,
  /// Usage, IO or format error.
  kUsage = 2,
};

/// Runs one command. `args` excludes the program name. Reads XMLSEAL_SEED
/// from the environment when the build allows seeding.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace xmlseal::cli
