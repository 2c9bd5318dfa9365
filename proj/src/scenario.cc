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

#include "srpp/scenario.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "srpp/rng.h"

namespace srpp {
namespace {

constexpr double kUnitTolerance = 1e-9;

absl::StatusOr<double> ParseDouble(absl::string_view text) {
  text = absl::StripAsciiWhitespace(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    return absl::InvalidArgumentError(absl::StrCat("not a number: '", text, "'"));
  }
  if (!std::isfinite(v)) {
    return absl::InvalidArgumentError(absl::StrCat("non-finite value: '", text, "'"));
  }
  return v;
}

absl::StatusOr<std::vector<std::string>> ReadLines(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("missing file: ", path.string()));
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

// Parses a header of the form <prefix>0,<prefix>1,... and returns the count of
// leading prefixed columns.
size_t CountPrefixedColumns(const std::vector<std::string>& header,
                            absl::string_view prefix) {
  size_t k = 0;
  while (k < header.size() &&
         absl::StripAsciiWhitespace(header[k]) == absl::StrCat(prefix, k)) {
    ++k;
  }
  return k;
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

absl::StatusOr<SliceProfile> SliceProfile::Create(Matrix directions,
                                                  std::vector<double> weights,
                                                  uint64_t seed,
                                                  bool iid_sampled) {
  if (directions.rows() == 0) {
    return absl::InvalidArgumentError("slice profile needs at least one direction");
  }
  if (directions.cols() == 0) {
    return absl::InvalidArgumentError("slice profile dimension must be positive");
  }
  if (weights.size() != directions.rows()) {
    return absl::InvalidArgumentError(
        absl::StrCat("slice profile has ", directions.rows(), " directions but ",
                     weights.size(), " weights"));
  }
  for (size_t l = 0; l < directions.rows(); ++l) {
    const double norm = Norm2(directions.row(l));
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kUnitTolerance) {
      return absl::InvalidArgumentError(
          absl::StrCat("direction ", l, " is not unit norm (", norm, ")"));
    }
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      return absl::InvalidArgumentError("slice weights must be nonnegative");
    }
    total += w;
  }
  if (total < 0.999 || total > 1.001) {
    return absl::InvalidArgumentError(
        absl::StrCat("slice weights sum to ", total, ", expected 1"));
  }
  // Leave rounding-level drift alone so files round-trip exactly.
  if (std::abs(total - 1.0) > 1e-12) {
    for (double& w : weights) w /= total;
  }

  SliceProfile p;
  p.directions_ = std::move(directions);
  p.weights_ = std::move(weights);
  p.seed_ = seed;
  p.iid_sampled_ = iid_sampled;
  return p;
}

absl::StatusOr<SliceProfile> SampleSliceProfile(size_t dim, size_t m,
                                                uint64_t seed) {
  if (dim == 0 || m == 0) {
    return absl::InvalidArgumentError("dim and m must be positive");
  }
  Matrix dirs(m, dim);
  for (size_t l = 0; l < m; ++l) {
    // One stream per direction so a profile's prefix is stable in m.
    Rng rng(seed, l);
    auto row = dirs.row(l);
    double norm = 0.0;
    do {
      for (double& x : row) x = rng.Normal();
      norm = Norm2(row);
    } while (norm < 1e-12);
    for (double& x : row) x /= norm;
  }
  return SliceProfile::Create(std::move(dirs),
                              std::vector<double>(m, 1.0 / static_cast<double>(m)),
                              seed, /*iid_sampled=*/true);
}

absl::Status SecretSpace::Validate() const {
  if (pairs.empty()) {
    return absl::InvalidArgumentError("secret space has no pairs");
  }
  const std::set<std::string> known(secrets.begin(), secrets.end());
  for (const SecretPair& p : pairs) {
    for (const std::string* id : {&p.first, &p.second}) {
      if (!known.contains(*id)) {
        return absl::InvalidArgumentError(absl::StrCat("unknown secret: ", *id));
      }
    }
    if (p.first == p.second) {
      return absl::InvalidArgumentError(
          absl::StrCat("pair repeats secret: ", p.first));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ScenarioDataset> ScenarioDataset::Create(
    SecretSpace secret_space, std::vector<WorldSample> worlds) {
  if (absl::Status s = secret_space.Validate(); !s.ok()) return s;
  if (worlds.empty()) {
    return absl::InvalidArgumentError("scenario has no worlds");
  }
  const std::set<std::string> known(secret_space.secrets.begin(),
                                    secret_space.secrets.end());
  std::map<std::pair<std::string, std::string>, size_t> index;
  const size_t dim = worlds.front().samples.cols();
  for (size_t w = 0; w < worlds.size(); ++w) {
    const WorldSample& ws = worlds[w];
    if (!known.contains(ws.secret_id)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown secret: ", ws.secret_id));
    }
    if (ws.samples.rows() == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("empty sample file for (", ws.prior_id, ", ",
                       ws.secret_id, ")"));
    }
    if (ws.samples.cols() != dim || dim == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("dimension mismatch for (", ws.prior_id, ", ",
                       ws.secret_id, "): ", ws.samples.cols(), " vs ", dim));
    }
    for (double v : ws.samples.data()) {
      if (!std::isfinite(v)) {
        return absl::InvalidArgumentError(
            absl::StrCat("non-finite sample for (", ws.prior_id, ", ",
                         ws.secret_id, ")"));
      }
    }
    if (!index.emplace(std::make_pair(ws.prior_id, ws.secret_id), w).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate world (", ws.prior_id, ", ", ws.secret_id, ")"));
    }
  }

  ScenarioDataset d;
  std::set<std::string> priors;
  for (const auto& ws : worlds) priors.insert(ws.prior_id);
  d.priors_.assign(priors.begin(), priors.end());
  for (const std::string& prior : d.priors_) {
    for (const SecretPair& pair : secret_space.pairs) {
      auto a = index.find({prior, pair.first});
      auto b = index.find({prior, pair.second});
      if (a == index.end() || b == index.end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("missing world for prior ", prior, " and pair ",
                         pair.first, "->", pair.second));
      }
      d.instances_.push_back({prior, pair, a->second, b->second});
    }
  }
  d.secret_space_ = std::move(secret_space);
  d.worlds_ = std::move(worlds);
  d.dim_ = dim;
  return d;
}

absl::StatusOr<Matrix> ReadSampleCsv(const std::filesystem::path& path) {
  auto lines = ReadLines(path);
  if (!lines.ok()) return lines.status();
  if (lines->empty()) {
    return absl::DataLossError(absl::StrCat("empty sample file: ", path.string()));
  }
  const std::vector<std::string> header = absl::StrSplit((*lines)[0], ',');
  const size_t d = CountPrefixedColumns(header, "f");
  if (d == 0 || d != header.size()) {
    return absl::DataLossError(
        absl::StrCat("bad sample header in ", path.string(), ": expected f0,f1,..."));
  }
  Matrix m;
  std::vector<double> row(d);
  for (size_t i = 1; i < lines->size(); ++i) {
    const std::string& line = (*lines)[i];
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    const std::vector<absl::string_view> cells = absl::StrSplit(line, ',');
    if (cells.size() != d) {
      return absl::DataLossError(
          absl::StrCat("dimension mismatch in ", path.string(), " line ", i + 1,
                       ": ", cells.size(), " columns, header has ", d));
    }
    for (size_t j = 0; j < d; ++j) {
      auto v = ParseDouble(cells[j]);
      if (!v.ok()) {
        return absl::DataLossError(absl::StrCat(path.string(), " line ", i + 1,
                                                ": ", v.status().message()));
      }
      row[j] = *v;
    }
    m.AppendRow(row);
  }
  if (m.rows() == 0) {
    return absl::DataLossError(absl::StrCat("empty sample file: ", path.string()));
  }
  return m;
}

absl::Status WriteSampleCsv(const std::filesystem::path& path,
                            const Matrix& samples) {
  std::ofstream out(path);
  if (!out) {
    return absl::NotFoundError(absl::StrCat("cannot write ", path.string()));
  }
  for (size_t j = 0; j < samples.cols(); ++j) {
    out << (j ? "," : "") << "f" << j;
  }
  out << "\n";
  for (size_t i = 0; i < samples.rows(); ++i) {
    for (size_t j = 0; j < samples.cols(); ++j) {
      out << (j ? "," : "") << FormatDouble(samples(i, j));
    }
    out << "\n";
  }
  return out ? absl::OkStatus()
             : absl::DataLossError(absl::StrCat("write failed: ", path.string()));
}

absl::StatusOr<SliceProfile> ReadSliceProfile(
    const std::filesystem::path& path) {
  auto lines = ReadLines(path);
  if (!lines.ok()) return lines.status();
  if (lines->empty()) {
    return absl::DataLossError(absl::StrCat("empty profile file: ", path.string()));
  }
  const std::vector<std::string> header = absl::StrSplit((*lines)[0], ',');
  const size_t d = CountPrefixedColumns(header, "u");
  if (d == 0 || header.size() != d + 1 ||
      absl::StripAsciiWhitespace(header.back()) != "weight") {
    return absl::DataLossError(absl::StrCat(
        "bad profile header in ", path.string(), ": expected u0,...,weight"));
  }
  Matrix dirs;
  std::vector<double> weights;
  std::vector<double> row(d);
  for (size_t i = 1; i < lines->size(); ++i) {
    if (absl::StripAsciiWhitespace((*lines)[i]).empty()) continue;
    const std::vector<absl::string_view> cells = absl::StrSplit((*lines)[i], ',');
    if (cells.size() != d + 1) {
      return absl::DataLossError(absl::StrCat("dimension mismatch in ",
                                              path.string(), " line ", i + 1));
    }
    for (size_t j = 0; j <= d; ++j) {
      auto v = ParseDouble(cells[j]);
      if (!v.ok()) {
        return absl::DataLossError(absl::StrCat(path.string(), " line ", i + 1,
                                                ": ", v.status().message()));
      }
      if (j < d) {
        row[j] = *v;
      } else {
        weights.push_back(*v);
      }
    }
    dirs.AppendRow(row);
  }
  // Files carry no sampling provenance; callers re-flag with MarkSampled.
  return SliceProfile::Create(std::move(dirs), std::move(weights));
}

std::string FormatSliceProfile(const SliceProfile& profile) {
  std::ostringstream out;
  for (size_t j = 0; j < profile.dim(); ++j) out << "u" << j << ",";
  out << "weight\n";
  for (size_t l = 0; l < profile.size(); ++l) {
    for (double x : profile.direction(l)) out << FormatDouble(x) << ",";
    out << FormatDouble(profile.weights()[l]) << "\n";
  }
  return out.str();
}

absl::StatusOr<ScenarioDataset> LoadScenario(
    const std::filesystem::path& manifest_path) {
  auto lines = ReadLines(manifest_path);
  if (!lines.ok()) return lines.status();
  const std::filesystem::path base = manifest_path.parent_path();

  SecretSpace space;
  bool have_secrets = false;
  bool have_pairs = false;
  struct WorldEntry {
    std::string prior, secret, file;
    size_t line;
  };
  std::vector<WorldEntry> entries;
  WorldEntry* current = nullptr;

  for (size_t i = 0; i < lines->size(); ++i) {
    absl::string_view line = absl::StripAsciiWhitespace((*lines)[i]);
    if (line.empty() || line.front() == '#') continue;
    if (line == "[world]") {
      entries.push_back({"", "", "", i + 1});
      current = &entries.back();
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::DataLossError(absl::StrCat(
          manifest_path.string(), " line ", i + 1, ": expected key = value"));
    }
    const std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    const std::string value(absl::StripAsciiWhitespace(line.substr(eq + 1)));
    if (current != nullptr) {
      if (key == "prior") {
        current->prior = value;
      } else if (key == "secret") {
        current->secret = value;
      } else if (key == "file") {
        current->file = value;
      } else {
        return absl::DataLossError(absl::StrCat(manifest_path.string(), " line ",
                                                i + 1, ": unknown world key '",
                                                key, "'"));
      }
      continue;
    }
    if (key == "secrets") {
      for (absl::string_view s : absl::StrSplit(value, ',')) {
        s = absl::StripAsciiWhitespace(s);
        if (!s.empty()) space.secrets.emplace_back(s);
      }
      have_secrets = true;
    } else if (key == "pairs") {
      for (absl::string_view entry : absl::StrSplit(value, ';')) {
        entry = absl::StripAsciiWhitespace(entry);
        if (entry.empty()) continue;
        const size_t arrow = entry.find("->");
        if (arrow == absl::string_view::npos) {
          return absl::DataLossError(absl::StrCat(
              manifest_path.string(), " line ", i + 1, ": bad pair '", entry, "'"));
        }
        space.pairs.push_back(
            {std::string(absl::StripAsciiWhitespace(entry.substr(0, arrow))),
             std::string(absl::StripAsciiWhitespace(entry.substr(arrow + 2)))});
      }
      have_pairs = true;
    } else {
      return absl::DataLossError(absl::StrCat(manifest_path.string(), " line ",
                                              i + 1, ": unknown key '", key, "'"));
    }
  }
  if (!have_secrets || !have_pairs) {
    return absl::DataLossError(absl::StrCat(
        manifest_path.string(), ": manifest needs 'secrets' and 'pairs'"));
  }
  if (absl::Status s = space.Validate(); !s.ok()) {
    return absl::DataLossError(
        absl::StrCat(manifest_path.string(), ": ", s.message()));
  }

  std::vector<WorldSample> worlds;
  for (const WorldEntry& e : entries) {
    if (e.prior.empty() || e.secret.empty() || e.file.empty()) {
      return absl::DataLossError(absl::StrCat(
          manifest_path.string(), " line ", e.line,
          ": [world] needs prior, secret and file"));
    }
    std::filesystem::path file(e.file);
    if (file.is_relative()) file = base / file;
    auto samples = ReadSampleCsv(file);
    if (!samples.ok()) return samples.status();
    worlds.push_back({e.prior, e.secret, *std::move(samples)});
  }
  auto dataset = ScenarioDataset::Create(std::move(space), std::move(worlds));
  if (!dataset.ok()) {
    return absl::DataLossError(
        absl::StrCat(manifest_path.string(), ": ", dataset.status().message()));
  }
  return dataset;
}

absl::StatusOr<std::vector<double>> Project(const Matrix& samples,
                                            std::span<const double> direction) {
  if (direction.size() != samples.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("direction has dimension ", direction.size(),
                     ", samples have ", samples.cols()));
  }
  if (std::abs(Norm2(direction) - 1.0) > kUnitTolerance) {
    return absl::InvalidArgumentError("direction is not unit norm");
  }
  std::vector<double> out;
  ProjectInto(samples, direction, out);
  return out;
}

void ProjectInto(const Matrix& samples, std::span<const double> direction,
                 std::vector<double>& out) {
  out.resize(samples.rows());
  for (size_t k = 0; k < samples.rows(); ++k) {
    out[k] = Dot(samples.row(k), direction);
  }
}

absl::StatusOr<std::filesystem::path> WriteScenario(
    const std::filesystem::path& dir, const ScenarioDataset& data) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::NotFoundError(absl::StrCat("cannot create ", dir.string()));
  }
  const SecretSpace& space = data.secret_space();
  std::ostringstream manifest;
  manifest << "secrets = " << absl::StrJoin(space.secrets, ",") << "\n";
  manifest << "pairs = "
           << absl::StrJoin(space.pairs, "; ",
                            [](std::string* out, const SecretPair& p) {
                              absl::StrAppend(out, p.first, "->", p.second);
                            })
           << "\n";
  const auto& worlds = data.worlds();
  for (size_t w = 0; w < worlds.size(); ++w) {
    const std::string file = absl::StrCat("world_", w, ".csv");
    if (absl::Status s = WriteSampleCsv(dir / file, worlds[w].samples); !s.ok()) {
      return s;
    }
    manifest << "\n[world]\nprior = " << worlds[w].prior_id
             << "\nsecret = " << worlds[w].secret_id << "\nfile = " << file << "\n";
  }
  const std::filesystem::path path = dir / "scenario.txt";
  std::ofstream out(path);
  out << manifest.str();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path.string()));
  return path;
}

absl::StatusOr<ScenarioDataset> GaussianShiftScenario(size_t num_priors,
                                                      size_t n, size_t dim,
                                                      double shift,
                                                      uint64_t seed) {
  if (num_priors == 0 || n == 0 || dim == 0) {
    return absl::InvalidArgumentError("priors, n and dim must be positive");
  }
  if (!(shift >= 0.0) || !std::isfinite(shift)) {
    return absl::InvalidArgumentError("shift must be finite and nonnegative");
  }
  std::vector<WorldSample> worlds;
  for (size_t j = 0; j < num_priors; ++j) {
    Rng rng(seed, j);
    std::vector<double> mu(dim);
    double norm = 0.0;
    do {
      for (double& x : mu) x = rng.Normal();
      norm = Norm2(mu);
    } while (norm < 1e-12);
    for (double& x : mu) x *= shift / norm;
    Matrix a(n, dim), b(n, dim);
    for (double& x : a.data()) x = rng.Normal();
    for (size_t r = 0; r < n; ++r) {
      for (size_t c = 0; c < dim; ++c) b(r, c) = mu[c] + rng.Normal();
    }
    const std::string prior = absl::StrCat("p", j);
    worlds.push_back({prior, "a", std::move(a)});
    worlds.push_back({prior, "b", std::move(b)});
  }
  return ScenarioDataset::Create(SecretSpace{{"a", "b"}, {{"a", "b"}}},
                                 std::move(worlds));
}

}  // namespace srpp
