// Copyright 2026 The SRPP Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SRPP_CLI_REPORT_H_
#define SRPP_CLI_REPORT_H_

#include <filesystem>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "srpp/calibrate.h"
#include "srpp/caps.h"
#include "srpp/sensitivity.h"

namespace srpp::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Two-space indented dump plus a trailing newline. Non-finite doubles become
// null.
std::string DumpJson(const Json& doc);
absl::Status WriteJson(const std::filesystem::path& path, const Json& doc);
absl::StatusOr<Json> ReadJson(const std::filesystem::path& path);
absl::Status WriteTextFile(const std::filesystem::path& path,
                           const std::string& text);

// Creates `dir` if needed; NotFound when that fails.
absl::Status EnsureDir(const std::filesystem::path& dir);

// Top-level report skeleton: schema_version, command.
Json ReportHeader(const std::string& command);

Json ToJson(const SensitivityProfile& profile);
Json ToJson(const CapEstimate& cap);

// {"sigma2", "dim", "mode", "alpha", "epsilon"}.
Json NoiseFile(const NoiseSpec& noise, const std::string& mode, double alpha,
               double epsilon);

}  // namespace srpp::cli

#endif  // SRPP_CLI_REPORT_H_
