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

#include "srpp/cli/commands.h"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <system_error>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "srpp/accountant.h"
#include "srpp/audit.h"
#include "srpp/calibrate.h"
#include "srpp/caps.h"
#include "srpp/rng.h"
#include "srpp/scenario.h"
#include "srpp/sensitivity.h"
#include "srpp/sgdsim.h"
#include "srpp/cli/svg.h"

namespace srpp::cli {
namespace {

Json Manifest(const std::string& command, const Json& params) {
  Json doc = ReportHeader(command);
  doc["params"] = params;
  return doc;
}

Json OptionalJson(const std::optional<double>& v) {
  return v.has_value() ? Json(*v) : Json();
}

// Seed for item `index` of stream `stream` under the master seed.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream, uint64_t index) {
  return Mix64(Mix64(seed ^ Mix64(stream + 1)) + index);
}

absl::Status WriteCsv(const std::filesystem::path& path,
                      const std::string& text) {
  return WriteTextFile(path, text);
}

std::string Cell(double v) { return FormatDouble(v); }

Json TrendJson(const std::vector<double>& series, bool increasing,
               int required) {
  Json j;
  j["direction"] = increasing ? "nondecreasing" : "nonincreasing";
  j["steps"] = MonotoneSteps(series, increasing);
  j["increments"] = series.empty() ? 0 : static_cast<int>(series.size()) - 1;
  j["required"] = required;
  j["holds"] = TrendHolds(series, increasing, required);
  return j;
}

bool StrictlyDecreasing(const std::vector<double>& v) {
  for (size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

absl::Status CheckEpsilons(const std::vector<double>& eps) {
  if (eps.empty()) return absl::InvalidArgumentError("epsilon grid is empty");
  for (double e : eps) {
    if (!(e > 0.0) || !std::isfinite(e)) {
      return absl::InvalidArgumentError(absl::StrCat("bad epsilon ", e));
    }
  }
  return absl::OkStatus();
}

template <typename F>
double TimeSeconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

int ExitCode(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kOutOfRange:
      return 2;
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kDataLoss:
      return 3;
    case absl::StatusCode::kFailedPrecondition:
      return 4;
    case absl::StatusCode::kResourceExhausted:
      return 5;
    default:
      return 1;
  }
}

absl::StatusOr<int> ApplyThreadEnv() {
  const char* env = std::getenv("SRPP_THREADS");
  if (env == nullptr || *env == '\0') return 0;
  int threads = 0;
  if (!absl::SimpleAtoi(env, &threads) || threads <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("SRPP_THREADS must be a positive integer, got '", env, "'"));
  }
  omp_set_num_threads(threads);
  return threads;
}

// gen-profile

Json Params(const GenProfileArgs& args) {
  Json j;
  j["dim"] = args.dim;
  j["m"] = args.m;
  j["seed"] = args.seed;
  j["out"] = args.out.string();
  return j;
}

absl::Status RunGenProfile(const GenProfileArgs& args) {
  auto profile = SampleSliceProfile(args.dim, args.m, args.seed);
  if (!profile.ok()) return profile.status();
  std::error_code ec;
  if (!args.force && std::filesystem::exists(args.out, ec) &&
      (!std::filesystem::is_regular_file(args.out, ec) ||
       std::filesystem::file_size(args.out, ec) > 0)) {
    return absl::AlreadyExistsError(absl::StrCat(
        args.out.string(), " exists and is not empty; pass --force to overwrite"));
  }
  if (args.out.has_parent_path()) {
    if (absl::Status s = EnsureDir(args.out.parent_path()); !s.ok()) return s;
  }
  if (absl::Status s = WriteTextFile(args.out, FormatSliceProfile(*profile));
      !s.ok()) {
    return s;
  }
  return WriteJson(args.out.string() + ".manifest.json",
                   Manifest("gen-profile", Params(args)));
}

// synth

Json Params(const SynthArgs& args) {
  Json j;
  j["priors"] = args.priors;
  j["n"] = args.n;
  j["dim"] = args.dim;
  j["shift"] = args.shift;
  j["seed"] = args.seed;
  j["out_dir"] = args.out_dir.string();
  return j;
}

absl::Status RunSynth(const SynthArgs& args) {
  auto data = GaussianShiftScenario(args.priors, args.n, args.dim, args.shift,
                                    args.seed);
  if (!data.ok()) return data.status();
  auto path = WriteScenario(args.out_dir, *data);
  if (!path.ok()) return path.status();
  return WriteJson(args.out_dir / "manifest.json", Manifest("synth", Params(args)));
}

// calibrate

Json Params(const CalibrateArgs& args) {
  Json j;
  j["manifest"] = args.manifest.string();
  j["profile"] = args.profile.string();
  j["mode"] = args.mode;
  j["alpha"] = args.alpha;
  j["epsilon"] = args.epsilon;
  j["gamma"] = OptionalJson(args.gamma);
  j["delta0"] = OptionalJson(args.delta0);
  j["rho"] = OptionalJson(args.rho);
  j["joint_union"] = args.joint_union;
  j["finite_profile"] = args.finite_profile;
  j["out_dir"] = args.out_dir.string();
  return j;
}

absl::StatusOr<CalibrateOutput> Calibrate(const CalibrateArgs& args) {
  auto mode = ParseCalibrationMode(args.mode);
  if (!mode.ok()) return mode.status();
  const bool pac =
      *mode == CalibrationMode::kAvePac || *mode == CalibrationMode::kJointPac;
  if (pac && !args.gamma.has_value()) {
    return absl::InvalidArgumentError("--gamma is required in PAC modes");
  }
  if (pac && !args.delta0.has_value()) {
    return absl::InvalidArgumentError("--delta0 is required in PAC modes");
  }
  auto spec = CalibrationSpec::Create(args.alpha, args.epsilon, *mode,
                                      pac ? args.gamma : std::nullopt);
  if (!spec.ok()) return spec.status();

  auto data = LoadScenario(args.manifest);
  if (!data.ok()) return data.status();
  auto file_profile = ReadSliceProfile(args.profile);
  if (!file_profile.ok()) return file_profile.status();
  const SliceProfile profile = file_profile->MarkSampled(!args.finite_profile);

  SensitivityOptions options;
  if (args.rho.has_value()) {
    options.mode = SensitivityMode::kDkw;
    options.rho = *args.rho;
    options.joint_union = args.joint_union;
  }
  options.delta0 = args.delta0.value_or(0.0);
  auto sens = BuildProfile(*data, profile, options);
  if (!sens.ok()) return sens.status();

  const size_t m = profile.size();
  absl::StatusOr<NoiseSpec> noise;
  std::optional<double> ucb;
  switch (*mode) {
    case CalibrationMode::kAve:
      noise = CalibrateAve(sens->mean_square, *spec);
      break;
    case CalibrationMode::kJoint:
      noise = CalibrateJoint(sens->worst, *spec);
      break;
    case CalibrationMode::kAvePac: {
      auto u = AveUcb(*sens, *args.gamma, m);
      if (!u.ok()) return u.status();
      ucb = *u;
      noise = CalibrateAvePac(*sens, *spec, m);
      break;
    }
    case CalibrationMode::kJointPac:
      noise = CalibrateJointPac(*sens, *spec, m);
      break;
  }
  if (!noise.ok()) return noise.status();
  if (noise->dim == 0) noise->dim = data->dim();

  Json report = ReportHeader("calibrate");
  report["params"] = Params(args);
  Json inputs;
  inputs["dim"] = data->dim();
  inputs["slices"] = m;
  inputs["instances"] = data->instances().size();
  inputs["priors"] = data->priors();
  report["inputs"] = inputs;
  report["sensitivity"] = ToJson(*sens);
  Json agg;
  agg["mean_square"] = sens->mean_square;
  agg["worst"] = sens->worst;
  agg["ave_ucb"] = OptionalJson(ucb);
  report["aggregates"] = agg;
  Json nj;
  nj["sigma2"] = noise->sigma2;
  nj["sigma"] = std::sqrt(noise->sigma2);
  nj["dim"] = noise->dim;
  report["noise"] = nj;
  if (pac) {
    const double sampling = sens->iid_sampled ? *args.gamma / 2.0 : 0.0;
    double estimation = 0.0;
    if (sens->rho.has_value()) {
      estimation = args.joint_union
                       ? *args.rho / 2.0
                       : std::min(1.0, *sens->rho * static_cast<double>(
                                                        m * data->instances().size()));
    }
    Json ledger = Json::array();
    ledger.push_back({{"source", "slice_sampling"}, {"failure", sampling}});
    ledger.push_back({{"source", "sensitivity_estimates"}, {"failure", estimation}});
    Json conf;
    conf["ledger"] = ledger;
    conf["total_failure"] = sampling + estimation;
    conf["confidence"] = 1.0 - (sampling + estimation);
    report["confidence"] = conf;
  }
  return CalibrateOutput{std::move(report),
                         NoiseFile(*noise, args.mode, args.alpha, args.epsilon)};
}

absl::Status RunCalibrate(const CalibrateArgs& args) {
  auto out = Calibrate(args);
  if (!out.ok()) return out.status();
  if (absl::Status s = EnsureDir(args.out_dir); !s.ok()) return s;
  if (absl::Status s = WriteJson(args.out_dir / "report.json", out->report); !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteJson(args.out_dir / "noise.json", out->noise); !s.ok()) {
    return s;
  }
  return WriteJson(args.out_dir / "manifest.json", Manifest("calibrate", Params(args)));
}

// caps

Json Params(const CapSourceArgs& args) {
  Json j;
  j["method"] = args.method;
  j["scheme"] = args.scheme;
  j["population"] = args.population;
  j["batch"] = args.batch;
  j["rate"] = args.rate;
  j["differing"] = args.differing;
  j["tau"] = args.tau;
  j["delta"] = args.delta;
  j["gamma"] = args.gamma;
  j["draws"] = args.draws;
  j["seed"] = args.seed;
  return j;
}

absl::StatusOr<CapEstimate> ResolveCaps(const CapSourceArgs& args) {
  if (args.method == "hypergeometric") {
    auto k = HypergeometricK2(args.population, args.differing, args.batch);
    if (!k.ok()) return k.status();
    CapEstimate cap;
    cap.tail_cap = static_cast<double>(std::min(args.differing, args.batch));
    cap.ms_cap = k->second_moment;
    cap.batch = args.batch;
    cap.method = CapMethod::kHypergeometric;
    return cap;
  }
  if (args.method == "binomial_tv") {
    if (args.batch <= 0) return absl::InvalidArgumentError("batch must be positive");
    if (!(args.tau >= 0.0 && args.tau <= 1.0)) {
      return absl::InvalidArgumentError("tau must lie in [0,1]");
    }
    if (!(args.delta > 0.0 && args.delta < 1.0)) {
      return absl::InvalidArgumentError("binomial_tv needs delta in (0,1)");
    }
    return CapsFromTv(args.tau, args.batch, args.delta);
  }
  if (args.method == "localized") {
    if (args.batch <= 0 || args.differing < 0) {
      return absl::InvalidArgumentError("localized needs batch > 0, differing >= 0");
    }
    return LocalizedCap(args.differing, args.batch);
  }
  if (args.method == "monte_carlo") {
    auto scheme = ParseSubsamplingScheme(args.scheme);
    if (!scheme.ok()) return scheme.status();
    auto sub = SubsamplingSpec::Create(*scheme, args.population, args.batch, args.rate);
    if (!sub.ok()) return sub.status();
    if (args.differing < 0 || args.differing > args.population) {
      return absl::InvalidArgumentError("differing must lie in [0, population]");
    }
    return McCaps(TwoWorldSampler(args.population, args.differing), *sub,
                  args.draws, args.delta, args.gamma, args.seed);
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown cap method '", args.method,
      "' (hypergeometric, binomial_tv, localized, monte_carlo)"));
}

absl::StatusOr<Json> CapsReport(const CapsArgs& args) {
  auto cap = ResolveCaps(args.source);
  if (!cap.ok()) return cap.status();
  Json report = ReportHeader("caps");
  report["params"] = Params(args.source);
  report["caps"] = ToJson(*cap);
  return report;
}

absl::Status RunCaps(const CapsArgs& args) {
  auto report = CapsReport(args);
  if (!report.ok()) return report.status();
  if (absl::Status s = EnsureDir(args.out_dir); !s.ok()) return s;
  if (absl::Status s = WriteJson(args.out_dir / "report.json", *report); !s.ok()) {
    return s;
  }
  Json params = Params(args.source);
  params["out_dir"] = args.out_dir.string();
  return WriteJson(args.out_dir / "manifest.json", Manifest("caps", params));
}

// account

Json Params(const AccountArgs& args) {
  Json j;
  j["profile"] = args.profile.string();
  j["mode"] = args.mode;
  j["alpha"] = args.alpha;
  j["epsilons"] = args.epsilons;
  j["iterations"] = args.iterations;
  j["clip"] = args.clip;
  j["lr"] = args.lr;
  j["compose"] = args.compose;
  j["caps"] = Params(args.caps);
  j["out_dir"] = args.out_dir.string();
  return j;
}

absl::StatusOr<Json> AccountReport(const AccountArgs& args) {
  auto mode = ParseAccountingMode(args.mode);
  if (!mode.ok()) return mode.status();
  if (absl::Status s = CheckEpsilons(args.epsilons); !s.ok()) return s;
  auto profile = ReadSliceProfile(args.profile);
  if (!profile.ok()) return profile.status();
  auto cap = ResolveCaps(args.caps);
  if (!cap.ok()) return cap.status();

  SgdHyper hyper;
  hyper.iterations = args.iterations;
  hyper.clip = args.clip;
  hyper.batch = {cap->batch};
  hyper.lipschitz = {args.lr};
  if (absl::Status s = hyper.Validate(); !s.ok()) return s;

  const bool joint = IsJoint(*mode);
  const AccountingMode worst_mode = joint ? AccountingMode::kJoint : AccountingMode::kAve;
  const AccountingMode sa_mode = joint ? AccountingMode::kSaJoint : AccountingMode::kSaAve;
  const std::vector<double> tail = {cap->tail_cap}, ms = {cap->ms_cap};
  auto worst = BuildLedger(hyper, tail, *profile, worst_mode);
  if (!worst.ok()) return worst.status();
  auto sa = BuildLedger(hyper, ms, *profile, sa_mode);
  if (!sa.ok()) return sa.status();
  const HucLedger& chosen = IsSubsamplingAware(*mode) ? *sa : *worst;

  Json table = Json::array();
  std::vector<MechanismBudget> budgets;
  for (double eps : args.epsilons) {
    auto s = SigmaForBudget(chosen, args.alpha, eps);
    if (!s.ok()) return s.status();
    auto sw = SigmaForBudget(*worst, args.alpha, eps);
    if (!sw.ok()) return sw.status();
    auto ss = SigmaForBudget(*sa, args.alpha, eps);
    if (!ss.ok()) return ss.status();
    Json row;
    row["epsilon"] = eps;
    row["sigma2"] = s->sigma2;
    row["sigma"] = std::sqrt(s->sigma2);
    row["sigma_worst"] = std::sqrt(sw->sigma2);
    row["sigma_sa"] = std::sqrt(ss->sigma2);
    row["sa_worst_ratio"] = std::sqrt(sw->sigma2 / ss->sigma2);
    table.push_back(row);
    budgets.push_back({args.alpha, eps, *mode});
  }

  Json per_iteration = Json::array();
  for (size_t t = 0; t < chosen.caps.size(); ++t) {
    HucLedger one = chosen;
    one.caps = {chosen.caps[t]};
    Json row;
    row["t"] = t;
    row["cap"] = IsSubsamplingAware(*mode) ? cap->ms_cap : cap->tail_cap;
    row["huc"] = one.Aggregate();
    per_iteration.push_back(row);
  }

  const std::vector<double> deltas(static_cast<size_t>(args.iterations), cap->delta);
  const std::vector<double> gammas = {cap->gamma};
  Json report = ReportHeader("account");
  report["params"] = Params(args);
  report["caps"] = ToJson(*cap);
  report["mode"] = std::string(AccountingModeName(*mode));
  report["aggregate"] = chosen.Aggregate();
  report["sigma_table"] = table;
  report["per_iteration"] = per_iteration;
  Json conf;
  conf["tail_failure"] = cap->delta * args.iterations;
  conf["estimation_failure"] = cap->gamma;
  conf["residual_confidence"] = ResidualConfidence(deltas, gammas);
  report["confidence"] = conf;
  if (args.compose) {
    auto composed = Compose(budgets);
    if (!composed.ok()) return composed.status();
    Json c;
    c["alpha"] = composed->alpha;
    c["epsilons"] = composed->epsilons;
    c["total"] = composed->total;
    report["composition"] = c;
  }
  return report;
}

absl::Status RunAccount(const AccountArgs& args) {
  auto report = AccountReport(args);
  if (!report.ok()) return report.status();
  if (absl::Status s = EnsureDir(args.out_dir); !s.ok()) return s;
  if (absl::Status s = WriteJson(args.out_dir / "report.json", *report); !s.ok()) {
    return s;
  }
  return WriteJson(args.out_dir / "manifest.json", Manifest("account", Params(args)));
}

// sweep

Json Params(const SweepArgs& args) {
  Json j;
  j["pipeline"] = args.pipeline;
  j["epsilons"] = args.epsilons;
  j["alpha"] = args.alpha;
  j["mode"] = args.mode;
  j["seed"] = args.seed;
  j["trials"] = args.trials;
  if (args.pipeline == "static") {
    j["manifest"] = args.manifest.string();
    j["profile"] = args.profile.string();
    j["prior"] = args.prior;
  } else {
    j["n_train"] = args.n_train;
    j["n_test"] = args.n_test;
    j["dim"] = args.dim;
    j["classes"] = args.classes;
    j["separation"] = args.separation;
    j["label_noise"] = args.label_noise;
    j["secret_class"] = args.secret_class;
    j["p_low"] = args.p_low;
    j["p_high"] = args.p_high;
    j["iterations"] = args.iterations;
    j["batch"] = args.batch;
    j["clip"] = args.clip;
    j["lr"] = args.lr;
    j["slices"] = args.slices;
  }
  j["out_dir"] = args.out_dir.string();
  return j;
}

namespace {

struct SweepRow {
  double epsilon = 0.0;
  double sigma2 = 0.0;
  UtilityMetrics utility;
  AuditReport attack;
  std::optional<double> test_accuracy;
};

absl::StatusOr<std::vector<SweepRow>> StaticSweep(const SweepArgs& args,
                                                  const std::string& mode_name,
                                                  Json& extra) {
  auto mode = ParseCalibrationMode(mode_name);
  if (!mode.ok()) return mode.status();
  if (*mode != CalibrationMode::kAve && *mode != CalibrationMode::kJoint) {
    return absl::InvalidArgumentError("static sweep supports ave and joint modes");
  }
  auto data = LoadScenario(args.manifest);
  if (!data.ok()) return data.status();
  auto profile = ReadSliceProfile(args.profile);
  if (!profile.ok()) return profile.status();
  auto sens = BuildProfile(*data, *profile, SensitivityOptions{});
  if (!sens.ok()) return sens.status();

  const std::string prior = args.prior.empty() ? data->priors().front() : args.prior;
  if (std::find(data->priors().begin(), data->priors().end(), prior) ==
      data->priors().end()) {
    return absl::InvalidArgumentError(absl::StrCat("unknown prior '", prior, "'"));
  }
  // Worlds under the chosen prior in secret declaration order.
  std::vector<const WorldSample*> worlds;
  for (const std::string& secret : data->secret_space().secrets) {
    for (const WorldSample& w : data->worlds()) {
      if (w.prior_id == prior && w.secret_id == secret) worlds.push_back(&w);
    }
  }
  if (worlds.size() < 2) {
    return absl::FailedPreconditionError(
        absl::StrCat("prior '", prior, "' has fewer than two secrets"));
  }
  const size_t dim = data->dim();
  Matrix means(worlds.size(), dim);
  Matrix truth(0, dim);
  std::vector<int32_t> labels;
  std::vector<double> prior_mass;
  size_t total = 0;
  for (size_t k = 0; k < worlds.size(); ++k) {
    const Matrix& s = worlds[k]->samples;
    for (size_t r = 0; r < s.rows(); ++r) {
      for (size_t c = 0; c < dim; ++c) means(k, c) += s(r, c) / s.rows();
    }
    total += s.rows();
  }
  for (size_t k = 0; k < worlds.size(); ++k) {
    prior_mass.push_back(static_cast<double>(worlds[k]->samples.rows()) / total);
  }
  for (int r = 0; r < args.trials; ++r) {
    for (size_t k = 0; k < worlds.size(); ++k) {
      for (size_t i = 0; i < worlds[k]->samples.rows(); ++i) {
        truth.AppendRow(worlds[k]->samples.row(i));
        labels.push_back(static_cast<int32_t>(k));
      }
    }
  }
  extra["sensitivity"] = ToJson(*sens);
  extra["prior"] = prior;
  extra["attack_prior"] = prior_mass;

  std::vector<SweepRow> rows;
  for (double eps : args.epsilons) {
    auto spec = CalibrationSpec::Create(args.alpha, eps, *mode);
    if (!spec.ok()) return spec.status();
    auto noise = *mode == CalibrationMode::kAve ? CalibrateAve(sens->mean_square, *spec)
                                                : CalibrateJoint(sens->worst, *spec);
    if (!noise.ok()) return noise.status();
    Matrix released(truth.rows(), dim);
    std::vector<absl::Status> status(truth.rows());
    const long n = static_cast<long>(truth.rows());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
      // Same draws at every epsilon: only the scale changes.
      auto y = Privatize(truth.row(static_cast<size_t>(i)), *noise,
                         DeriveSeed(args.seed, 0, static_cast<uint64_t>(i)));
      if (!y.ok()) {
        status[static_cast<size_t>(i)] = y.status();
        continue;
      }
      std::copy(y->begin(), y->end(), released.row(static_cast<size_t>(i)).begin());
    }
    for (const absl::Status& s : status) {
      if (!s.ok()) return s;
    }
    SweepRow row;
    row.epsilon = eps;
    row.sigma2 = noise->sigma2;
    auto util = Utility(released, truth);
    if (!util.ok()) return util.status();
    row.utility = *util;
    auto attack = AttackSpec::Create(means, prior_mass, std::max(noise->sigma2, 1e-300));
    if (!attack.ok()) return attack.status();
    auto preds = MapAttack(released, *attack);
    if (!preds.ok()) return preds.status();
    auto metrics = AttackMetrics(*preds, labels, prior_mass);
    if (!metrics.ok()) return metrics.status();
    row.attack = *metrics;
    rows.push_back(row);
  }
  return rows;
}

struct TrialOutcome {
  std::vector<double> params;
  double test_accuracy = 0.0;
  double auc = 0.0;
};

absl::StatusOr<std::vector<TrialOutcome>> RunTrials(
    const std::vector<LabeledDataset>& worlds, const LabeledDataset& test,
    const SgdHyper& hyper, const SubsamplingSpec& sub, double grad_sigma2,
    int trials, uint64_t seed) {
  std::vector<TrialOutcome> out(static_cast<size_t>(trials));
  std::vector<absl::Status> status(static_cast<size_t>(trials));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < trials; ++r) {
    const size_t k = static_cast<size_t>(r);
    const LabeledDataset& world = worlds[k % worlds.size()];
    auto tr = RunSgd(world, hyper, sub, {grad_sigma2, 0},
                     DeriveSeed(seed, 1, static_cast<uint64_t>(r)));
    if (!tr.ok()) {
      status[k] = tr.status();
      continue;
    }
    auto on_test = Evaluate(*tr, test);
    auto on_train = Evaluate(*tr, world);
    if (!on_test.ok() || !on_train.ok()) {
      status[k] = on_test.ok() ? on_train.status() : on_test.status();
      continue;
    }
    auto auc = LossThresholdMiaAuc(on_train->per_example_losses,
                                   on_test->per_example_losses);
    if (!auc.ok()) {
      status[k] = auc.status();
      continue;
    }
    out[k] = {tr->final_params(), on_test->accuracy, *auc};
  }
  for (const absl::Status& s : status) {
    if (!s.ok()) return s;
  }
  return out;
}

absl::StatusOr<std::vector<SweepRow>> IterativeSweep(const SweepArgs& args,
                                                     const std::string& mode_name,
                                                     Json& extra) {
  auto mode = ParseAccountingMode(mode_name);
  if (!mode.ok()) return mode.status();
  if (args.trials < 2) {
    return absl::InvalidArgumentError("iterative sweep needs at least 2 trials");
  }
  if (args.classes < 2) return absl::InvalidArgumentError("need at least 2 classes");
  if (args.n_train == 0 || args.n_test == 0 || args.dim == 0) {
    return absl::InvalidArgumentError("n_train, n_test and dim must be positive");
  }
  const LabeledDataset all =
      MakeSyntheticLogistic(args.n_train + args.n_test, args.dim, args.classes,
                            args.separation, args.seed, args.label_noise);
  auto split = SplitDataset(all, args.n_train);
  if (!split.ok()) return split.status();
  const LabeledDataset& train = split->first;
  const LabeledDataset& test = split->second;
  double p_low = args.p_low;
  if (p_low < 0) {
    p_low = static_cast<double>(std::count(train.labels.begin(), train.labels.end(),
                                           args.secret_class)) /
            static_cast<double>(args.n_train);
  }
  const double p_high =
      args.p_high < 0 ? std::min(1.0, p_low + 4.0 / static_cast<double>(args.n_train))
                      : args.p_high;
  auto pair = BuildTwoWorld(train.labels, args.secret_class, args.classes, p_low, p_high,
                            DeriveSeed(args.seed, 2, 0));
  if (!pair.ok()) return pair.status();
  std::vector<LabeledDataset> worlds(2, train);
  worlds[0].labels = pair->y0;
  worlds[1].labels = pair->y1;

  auto sub = SubsamplingSpec::Create(SubsamplingScheme::kWOR,
                                     static_cast<int64_t>(args.n_train), args.batch);
  if (!sub.ok()) return sub.status();
  CapSourceArgs cap_args;
  cap_args.population = static_cast<int64_t>(args.n_train);
  cap_args.batch = args.batch;
  cap_args.differing = pair->edit_count;
  auto cap = ResolveCaps(cap_args);
  if (!cap.ok()) return cap.status();

  SgdHyper hyper;
  hyper.iterations = args.iterations;
  hyper.clip = args.clip;
  hyper.batch = {args.batch};
  hyper.lipschitz = {args.lr};
  if (absl::Status s = hyper.Validate(); !s.ok()) return s;
  auto profile = SampleSliceProfile(LogisticParamCount(args.dim, args.classes),
                                    args.slices, DeriveSeed(args.seed, 3, 0));
  if (!profile.ok()) return profile.status();
  const std::vector<double> per_iter = {IsSubsamplingAware(*mode) ? cap->ms_cap
                                                                   : cap->tail_cap};
  auto ledger = BuildLedger(hyper, per_iter, *profile, *mode);
  if (!ledger.ok()) return ledger.status();

  // Attacker's reference outputs: one noise-free run per world.
  const size_t p = LogisticParamCount(args.dim, args.classes);
  Matrix means(2, p);
  for (size_t s = 0; s < 2; ++s) {
    auto ref = RunSgd(worlds[s], hyper, *sub, {0.0, 0}, DeriveSeed(args.seed, 4, 0));
    if (!ref.ok()) return ref.status();
    std::copy(ref->final_params().begin(), ref->final_params().end(),
              means.row(s).begin());
  }
  std::vector<int32_t> truth(static_cast<size_t>(args.trials));
  Matrix reference(static_cast<size_t>(args.trials), p);
  for (int r = 0; r < args.trials; ++r) {
    truth[r] = r % 2;
    std::copy(means.row(r % 2).begin(), means.row(r % 2).end(),
              reference.row(static_cast<size_t>(r)).begin());
  }
  const std::vector<double> attack_prior = {
      static_cast<double>((args.trials + 1) / 2) / args.trials,
      static_cast<double>(args.trials / 2) / args.trials};

  auto baseline = RunTrials(worlds, test, hyper, *sub, 0.0, args.trials, args.seed);
  if (!baseline.ok()) return baseline.status();
  Json np;
  double acc = 0.0, auc = 0.0;
  for (const TrialOutcome& o : *baseline) {
    acc += o.test_accuracy / args.trials;
    auc += o.auc / args.trials;
  }
  np["test_accuracy"] = acc;
  np["auc"] = auc;
  extra["nonprivate"] = np;
  extra["p_low"] = p_low;
  extra["p_high"] = p_high;
  extra["edit_count"] = pair->edit_count;
  extra["caps"] = ToJson(*cap);
  extra["accounting_mode"] = std::string(AccountingModeName(*mode));

  std::vector<SweepRow> rows;
  Json shifts = Json::array();
  bool shifts_hold = true;
  for (double eps : args.epsilons) {
    auto noise = SigmaForBudget(*ledger, args.alpha, eps);
    if (!noise.ok()) return noise.status();
    // The ledger measures parameter-space shifts (L_t = lr), SGD adds noise
    // before the step: scale back by lr^2.
    const double grad_sigma2 = noise->sigma2 / (args.lr * args.lr);
    auto outcomes =
        RunTrials(worlds, test, hyper, *sub, grad_sigma2, args.trials, args.seed);
    if (!outcomes.ok()) return outcomes.status();
    Matrix finals(static_cast<size_t>(args.trials), p);
    SweepRow row;
    row.epsilon = eps;
    row.sigma2 = noise->sigma2;
    row.test_accuracy = 0.0;
    double auc_sum = 0.0;
    for (int r = 0; r < args.trials; ++r) {
      const TrialOutcome& o = (*outcomes)[static_cast<size_t>(r)];
      std::copy(o.params.begin(), o.params.end(),
                finals.row(static_cast<size_t>(r)).begin());
      *row.test_accuracy += o.test_accuracy / args.trials;
      auc_sum += o.auc / args.trials;
    }
    auto util = Utility(finals, reference);
    if (!util.ok()) return util.status();
    row.utility = *util;
    auto spec = AttackSpec::Create(means, attack_prior,
                                   std::max(args.iterations * noise->sigma2, 1e-300));
    if (!spec.ok()) return spec.status();
    auto preds = MapAttack(finals, *spec);
    if (!preds.ok()) return preds.status();
    auto metrics = AttackMetrics(*preds, truth, attack_prior);
    if (!metrics.ok()) return metrics.status();
    row.attack = *metrics;
    row.attack.auc = auc_sum;
    rows.push_back(row);

    auto trace = CoupledShiftTrace(train.features, pair->y0, pair->y1, args.classes,
                                   hyper, *sub, {grad_sigma2, 0},
                                   DeriveSeed(args.seed, 5, 0));
    if (!trace.ok()) return trace.status();
    double max_shift = 0.0, max_excess = -INFINITY;
    for (const CoupledShift& c : *trace) {
      max_shift = std::max(max_shift, c.shift_norm);
      max_excess = std::max(max_excess, c.shift_norm - c.bound);
    }
    const bool holds = max_excess <= 1e-12;
    shifts_hold = shifts_hold && holds;
    Json sj;
    sj["epsilon"] = eps;
    sj["max_shift"] = max_shift;
    sj["max_excess"] = max_excess;
    sj["holds"] = holds;
    shifts.push_back(sj);
  }
  Json sc;
  sc["per_epsilon"] = shifts;
  sc["holds"] = shifts_hold;
  extra["shift_check"] = sc;
  return rows;
}

}  // namespace

absl::StatusOr<SweepOutput> Sweep(const SweepArgs& args) {
  if (absl::Status s = CheckEpsilons(args.epsilons); !s.ok()) return s;
  if (args.trials <= 0) return absl::InvalidArgumentError("trials must be positive");
  const bool iterative = args.pipeline == "iterative";
  if (!iterative && args.pipeline != "static") {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown pipeline '", args.pipeline, "' (static, iterative)"));
  }
  std::vector<double> eps = args.epsilons;
  std::sort(eps.begin(), eps.end());
  if (std::adjacent_find(eps.begin(), eps.end()) != eps.end()) {
    return absl::InvalidArgumentError("epsilon grid has duplicates");
  }
  SweepArgs sorted = args;
  sorted.epsilons = eps;
  const std::string mode = !args.mode.empty() ? args.mode : iterative ? "sa_ave" : "ave";

  Json extra;
  auto rows = iterative ? IterativeSweep(sorted, mode, extra)
                        : StaticSweep(sorted, mode, extra);
  if (!rows.ok()) return rows.status();

  SweepOutput out;
  out.report = ReportHeader("sweep");
  out.report["params"] = Params(args);
  out.report["mode"] = mode;
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    out.report[it.key()] = it.value();
  }
  std::string csv = "epsilon,mode,mse,mae,attack_acc,advantage,auc,sigma\n";
  Json jrows = Json::array();
  std::vector<double> sigma, mse, mae, acc, adv, auc, test_acc;
  for (const SweepRow& r : *rows) {
    const double s = std::sqrt(r.sigma2);
    absl::StrAppend(&csv, Cell(r.epsilon), ",", mode, ",", Cell(r.utility.mse), ",",
                    Cell(r.utility.mae), ",", Cell(r.attack.accuracy), ",",
                    Cell(r.attack.advantage), ",",
                    r.attack.auc.has_value() ? Cell(*r.attack.auc) : "", ",",
                    Cell(s), "\n");
    Json j;
    j["epsilon"] = r.epsilon;
    j["sigma2"] = r.sigma2;
    j["sigma"] = s;
    j["mse"] = r.utility.mse;
    j["mae"] = r.utility.mae;
    j["mean_l2"] = r.utility.mean_l2;
    j["attack_acc"] = r.attack.accuracy;
    j["advantage"] = r.attack.advantage;
    j["auc"] = r.attack.auc.has_value() ? Json(*r.attack.auc) : Json();
    j["test_accuracy"] = OptionalJson(r.test_accuracy);
    jrows.push_back(j);
    sigma.push_back(s);
    mse.push_back(r.utility.mse);
    mae.push_back(r.utility.mae);
    acc.push_back(r.attack.accuracy);
    adv.push_back(r.attack.advantage);
    if (r.attack.auc.has_value()) auc.push_back(*r.attack.auc);
    if (r.test_accuracy.has_value()) test_acc.push_back(*r.test_accuracy);
  }
  out.report["rows"] = jrows;
  constexpr int kRequired = 3;
  Json trends;
  trends["sigma_strictly_decreasing"] = StrictlyDecreasing(sigma);
  trends["mse"] = TrendJson(mse, false, kRequired);
  trends["attack_acc"] = TrendJson(acc, true, kRequired);
  if (iterative) {
    trends["advantage"] = TrendJson(adv, true, kRequired);
    trends["test_accuracy"] = TrendJson(test_acc, true, kRequired);
  }
  out.report["trends"] = trends;
  out.csv = std::move(csv);

  auto plot = [&](const std::string& metric, const std::vector<double>& y) {
    ChartSpec spec{metric + " vs epsilon", "epsilon (log scale)", metric, true};
    const Series s{mode, eps, y};
    out.plots.emplace_back(metric + ".svg", LineChartSvg(spec, std::span(&s, 1)));
  };
  plot("mse", mse);
  plot("mae", mae);
  plot("attack_acc", acc);
  plot("advantage", adv);
  if (!auc.empty()) plot("auc", auc);
  if (!test_acc.empty()) plot("test_accuracy", test_acc);
  plot("sigma", sigma);
  return out;
}

absl::Status RunSweep(const SweepArgs& args) {
  auto out = Sweep(args);
  if (!out.ok()) return out.status();
  if (absl::Status s = EnsureDir(args.out_dir); !s.ok()) return s;
  if (absl::Status s = WriteCsv(args.out_dir / "results.csv", out->csv); !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteJson(args.out_dir / "report.json", out->report); !s.ok()) {
    return s;
  }
  for (const auto& [name, svg] : out->plots) {
    if (absl::Status s = WriteTextFile(args.out_dir / name, svg); !s.ok()) return s;
  }
  return WriteJson(args.out_dir / "manifest.json", Manifest("sweep", Params(args)));
}

// bench

Json Params(const BenchArgs& args) {
  Json j;
  j["n_grid"] = args.n_grid;
  j["oracle_grid"] = args.oracle_grid;
  j["dim"] = args.dim;
  j["m"] = args.m;
  j["instances"] = args.instances;
  j["reps"] = args.reps;
  j["seed"] = args.seed;
  j["m_doubling"] = args.m_doubling;
  j["out_dir"] = args.out_dir.string();
  return j;
}

double LogLogSlope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::nan("");
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : std::nan("");
}

absl::StatusOr<BenchOutput> Bench(const BenchArgs& args) {
  if (args.reps <= 0 || args.m == 0 || args.dim == 0 || args.instances == 0) {
    return absl::InvalidArgumentError("reps, m, dim and instances must be positive");
  }
  for (size_t n : args.oracle_grid) {
    if (n > kMaxOracleSamples) {
      return absl::ResourceExhaustedError(absl::StrCat(
          "oracle grid point ", n, " exceeds the oracle limit ", kMaxOracleSamples));
    }
  }
  std::string csv = "kind,n,m,seconds\n";
  auto sliced_time = [&](size_t n, size_t m) -> absl::StatusOr<double> {
    auto data = GaussianShiftScenario(args.instances, n, args.dim, 1.0, args.seed);
    if (!data.ok()) return data.status();
    auto profile = SampleSliceProfile(args.dim, m, DeriveSeed(args.seed, 6, 0));
    if (!profile.ok()) return profile.status();
    double best = INFINITY;
    for (int r = 0; r < args.reps; ++r) {
      absl::Status status;
      const double t = TimeSeconds([&] {
        status = BuildProfile(*data, *profile, SensitivityOptions{}).status();
      });
      if (!status.ok()) return status;
      best = std::min(best, t);
    }
    return best;
  };
  std::vector<double> ns, sliced;
  for (size_t n : args.n_grid) {
    auto t = sliced_time(n, args.m);
    if (!t.ok()) return t.status();
    ns.push_back(static_cast<double>(n));
    sliced.push_back(*t);
    absl::StrAppend(&csv, "sliced,", n, ",", args.m, ",", Cell(*t), "\n");
  }
  std::vector<double> ons, oracle;
  for (size_t n : args.oracle_grid) {
    auto data = GaussianShiftScenario(args.instances, n, args.dim, 1.0, args.seed);
    if (!data.ok()) return data.status();
    double best = INFINITY;
    for (int r = 0; r < args.reps; ++r) {
      // Small inputs run in well under a millisecond; batch calls.
      int calls = 0;
      absl::Status status;
      const double t = TimeSeconds([&] {
        const auto start = std::chrono::steady_clock::now();
        do {
          status = FullSensitivityOracle(*data).status();
          ++calls;
        } while (status.ok() && std::chrono::steady_clock::now() - start <
                                    std::chrono::milliseconds(50));
      });
      if (!status.ok()) return status;
      best = std::min(best, t / calls);
    }
    ons.push_back(static_cast<double>(n));
    oracle.push_back(best);
    absl::StrAppend(&csv, "oracle,", n, ",0,", Cell(best), "\n");
  }

  BenchOutput out;
  out.report = ReportHeader("bench");
  out.report["params"] = Params(args);
  out.report["threads"] = omp_get_max_threads();
  out.report["sliced_seconds"] = sliced;
  out.report["oracle_seconds"] = oracle;
  out.report["sliced_slope"] = LogLogSlope(ns, sliced);
  out.report["oracle_slope"] = LogLogSlope(ons, oracle);
  if (args.m_doubling && !args.n_grid.empty()) {
    auto t2 = sliced_time(args.n_grid.front(), 2 * args.m);
    if (!t2.ok()) return t2.status();
    absl::StrAppend(&csv, "sliced,", args.n_grid.front(), ",", 2 * args.m, ",",
                    Cell(*t2), "\n");
    out.report["m_doubling_ratio"] = *t2 / sliced.front();
  }
  out.csv = std::move(csv);
  return out;
}

absl::Status RunBench(const BenchArgs& args) {
  auto out = Bench(args);
  if (!out.ok()) return out.status();
  if (absl::Status s = EnsureDir(args.out_dir); !s.ok()) return s;
  if (absl::Status s = WriteCsv(args.out_dir / "timings.csv", out->csv); !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteJson(args.out_dir / "report.json", out->report); !s.ok()) {
    return s;
  }
  return WriteJson(args.out_dir / "manifest.json", Manifest("bench", Params(args)));
}

}  // namespace srpp::cli
