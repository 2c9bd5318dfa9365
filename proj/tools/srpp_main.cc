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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "srpp/cli/commands.h"

namespace {

using srpp::cli::ExitCode;

std::optional<double> Opt(CLI::Option* opt, double value) {
  return opt->count() > 0 ? std::optional<double>(value) : std::nullopt;
}

void AddCapSource(CLI::App* cmd, srpp::cli::CapSourceArgs& caps) {
  cmd->add_option("--caps", caps.method,
                  "hypergeometric|binomial_tv|localized|monte_carlo")
      ->capture_default_str();
  cmd->add_option("--scheme", caps.scheme, "wr|wor|poisson (monte_carlo)")
      ->capture_default_str();
  cmd->add_option("--population", caps.population, "dataset size n");
  cmd->add_option("--batch", caps.batch, "minibatch size B")->required();
  cmd->add_option("--rate", caps.rate, "poisson sampling rate");
  cmd->add_option("--differing", caps.differing, "records differing between worlds");
  cmd->add_option("--tau", caps.tau, "total-variation bound (binomial_tv)");
  cmd->add_option("--cap-delta", caps.delta, "tail level of the worst-case cap");
  cmd->add_option("--cap-gamma", caps.gamma, "Monte-Carlo failure probability");
  cmd->add_option("--draws", caps.draws, "Monte-Carlo draws")->capture_default_str();
  cmd->add_option("--cap-seed", caps.seed, "Monte-Carlo seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sliced Renyi Pufferfish privacy toolkit"};
  app.require_subcommand(1);

  srpp::cli::GenProfileArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-profile", "sample a slice profile");
  gen_cmd->add_option("--dim", gen.dim)->required();
  gen_cmd->add_option("--m", gen.m, "number of directions")->required();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--out", gen.out)->required();
  gen_cmd->add_flag("--force", gen.force, "overwrite a non-empty output file");

  srpp::cli::SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "write a Gaussian shift scenario");
  synth_cmd->add_option("--priors", synth.priors)->capture_default_str();
  synth_cmd->add_option("--n", synth.n)->capture_default_str();
  synth_cmd->add_option("--dim", synth.dim)->capture_default_str();
  synth_cmd->add_option("--shift", synth.shift)->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--out-dir", synth.out_dir)->required();

  srpp::cli::CalibrateArgs cal;
  double cal_gamma = 0, cal_delta0 = 0, cal_rho = 0;
  auto* cal_cmd = app.add_subcommand("calibrate", "sensitivity plus noise calibration");
  cal_cmd->add_option("--manifest", cal.manifest, "scenario manifest")->required();
  cal_cmd->add_option("--profile", cal.profile, "slice profile CSV")->required();
  cal_cmd->add_option("--mode", cal.mode, "ave|joint|ave_pac|joint_pac")
      ->capture_default_str();
  cal_cmd->add_option("--alpha", cal.alpha)->capture_default_str();
  cal_cmd->add_option("--epsilon", cal.epsilon)->capture_default_str();
  auto* gamma_opt = cal_cmd->add_option("--gamma", cal_gamma, "PAC failure probability");
  auto* delta0_opt = cal_cmd->add_option("--delta0", cal_delta0, "a.s. sensitivity bound");
  auto* rho_opt = cal_cmd->add_option("--rho", cal_rho, "DKW estimate failure probability");
  cal_cmd->add_flag("--joint-union", cal.joint_union,
                    "read rho as a global budget split over all estimates");
  cal_cmd->add_flag("--finite-profile", cal.finite_profile,
                    "treat the profile as the full slice set (no Hoeffding term)");
  cal_cmd->add_option("--out-dir", cal.out_dir)->required();

  srpp::cli::CapsArgs caps;
  auto* caps_cmd = app.add_subcommand("caps", "discrepancy caps");
  AddCapSource(caps_cmd, caps.source);
  caps_cmd->add_option("--out-dir", caps.out_dir)->required();

  srpp::cli::AccountArgs acc;
  auto* acc_cmd = app.add_subcommand("account", "SGD noise accounting");
  acc_cmd->add_option("--profile", acc.profile)->required();
  acc_cmd->add_option("--mode", acc.mode, "ave|joint|sa_ave|sa_joint")
      ->capture_default_str();
  acc_cmd->add_option("--alpha", acc.alpha)->capture_default_str();
  acc_cmd->add_option("--epsilons", acc.epsilons)->delimiter(',')->required();
  acc_cmd->add_option("--iterations", acc.iterations)->required();
  acc_cmd->add_option("--clip", acc.clip)->required();
  acc_cmd->add_option("--lr", acc.lr, "per-iteration Lipschitz constant")->required();
  acc_cmd->add_flag("--compose", acc.compose, "compose the grid budgets");
  AddCapSource(acc_cmd, acc.caps);
  acc_cmd->add_option("--out-dir", acc.out_dir)->required();

  srpp::cli::SweepArgs sw;
  auto* sw_cmd = app.add_subcommand("sweep", "privacy/utility sweep over epsilon");
  sw_cmd->add_option("--pipeline", sw.pipeline, "static|iterative")->capture_default_str();
  sw_cmd->add_option("--epsilons", sw.epsilons)->delimiter(',')->required();
  sw_cmd->add_option("--alpha", sw.alpha)->capture_default_str();
  sw_cmd->add_option("--mode", sw.mode, "calibration or accounting mode");
  sw_cmd->add_option("--seed", sw.seed)->capture_default_str();
  sw_cmd->add_option("--trials", sw.trials)->capture_default_str();
  sw_cmd->add_option("--manifest", sw.manifest, "static: scenario manifest");
  sw_cmd->add_option("--profile", sw.profile, "static: slice profile CSV");
  sw_cmd->add_option("--prior", sw.prior, "static: prior to attack");
  sw_cmd->add_option("--n-train", sw.n_train)->capture_default_str();
  sw_cmd->add_option("--n-test", sw.n_test)->capture_default_str();
  sw_cmd->add_option("--dim", sw.dim)->capture_default_str();
  sw_cmd->add_option("--classes", sw.classes)->capture_default_str();
  sw_cmd->add_option("--separation", sw.separation)->capture_default_str();
  sw_cmd->add_option("--label-noise", sw.label_noise)->capture_default_str();
  sw_cmd->add_option("--secret-class", sw.secret_class)->capture_default_str();
  sw_cmd->add_option("--p-low", sw.p_low, "default: realized prevalence");
  sw_cmd->add_option("--p-high", sw.p_high, "default: p_low + 4/n_train");
  sw_cmd->add_option("--iterations", sw.iterations)->capture_default_str();
  sw_cmd->add_option("--batch", sw.batch)->capture_default_str();
  sw_cmd->add_option("--clip", sw.clip)->capture_default_str();
  sw_cmd->add_option("--lr", sw.lr)->capture_default_str();
  sw_cmd->add_option("--slices", sw.slices)->capture_default_str();
  sw_cmd->add_option("--out-dir", sw.out_dir)->required();

  srpp::cli::BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "sliced vs unsliced timings");
  bench_cmd->add_option("--n-grid", bench.n_grid)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--oracle-grid", bench.oracle_grid)
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--dim", bench.dim)->capture_default_str();
  bench_cmd->add_option("--m", bench.m)->capture_default_str();
  bench_cmd->add_option("--instances", bench.instances)->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--out-dir", bench.out_dir)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  auto threads = srpp::cli::ApplyThreadEnv();
  absl::Status status = threads.status();
  if (status.ok()) {
    if (gen_cmd->parsed()) {
      status = srpp::cli::RunGenProfile(gen);
    } else if (synth_cmd->parsed()) {
      status = srpp::cli::RunSynth(synth);
    } else if (cal_cmd->parsed()) {
      cal.gamma = Opt(gamma_opt, cal_gamma);
      cal.delta0 = Opt(delta0_opt, cal_delta0);
      cal.rho = Opt(rho_opt, cal_rho);
      status = srpp::cli::RunCalibrate(cal);
    } else if (caps_cmd->parsed()) {
      status = srpp::cli::RunCaps(caps);
    } else if (acc_cmd->parsed()) {
      status = srpp::cli::RunAccount(acc);
    } else if (sw_cmd->parsed()) {
      status = srpp::cli::RunSweep(sw);
    } else if (bench_cmd->parsed()) {
      status = srpp::cli::RunBench(bench);
    }
  }
  if (!status.ok()) {
    std::cerr << "srpp: " << status.message() << "\n";
  }
  return ExitCode(status);
}
