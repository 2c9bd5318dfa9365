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

#include "srpp/cli/report.h"

#include <fstream>
#include <sstream>
#include <system_error>

#include "absl/strings/str_cat.h"

namespace srpp::cli {

std::string DumpJson(const Json& doc) { return doc.dump(2) + "\n"; }

absl::Status WriteTextFile(const std::filesystem::path& path,
                           const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::NotFoundError(absl::StrCat("cannot write ", path.string()));
  out << text;
  out.close();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path.string()));
  return absl::OkStatus();
}

absl::Status WriteJson(const std::filesystem::path& path, const Json& doc) {
  return WriteTextFile(path, DumpJson(doc));
}

absl::StatusOr<Json> ReadJson(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  Json doc = Json::parse(buf.str(), nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::DataLossError(absl::StrCat("malformed JSON in ", path.string()));
  }
  return doc;
}

absl::Status EnsureDir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::NotFoundError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  return absl::OkStatus();
}

Json ReportHeader(const std::string& command) {
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = command;
  return doc;
}

Json ToJson(const SensitivityProfile& profile) {
  Json j;
  j["mode"] = profile.mode == SensitivityMode::kExact ? "exact" : "dkw";
  j["iid_sampled"] = profile.iid_sampled;
  j["rho_per_estimate"] = profile.rho.has_value() ? Json(*profile.rho) : Json();
  j["delta0"] = profile.delta0;
  j["mean_square"] = profile.mean_square;
  j["worst"] = profile.worst;
  j["per_slice"] = profile.per_slice;
  return j;
}

Json ToJson(const CapEstimate& cap) {
  Json j;
  j["method"] = std::string(CapMethodName(cap.method));
  j["batch"] = cap.batch;
  j["tail_cap"] = cap.tail_cap;
  j["delta"] = cap.delta;
  j["ms_cap"] = cap.ms_cap;
  j["gamma"] = cap.gamma;
  return j;
}

Json NoiseFile(const NoiseSpec& noise, const std::string& mode, double alpha,
               double epsilon) {
  Json j;
  j["sigma2"] = noise.sigma2;
  j["dim"] = noise.dim;
  j["mode"] = mode;
  j["alpha"] = alpha;
  j["epsilon"] = epsilon;
  return j;
}

}  // namespace srpp::cli
