// Copyright 2026 The qubound Authors
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

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <string>

#include "CLI11.hpp"
#include "qub/bounds.hpp"
#include "qub/json_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kValidation = 3;
constexpr int kResource = 4;
constexpr int kViolation = 5;

using qub::Json;

struct Options {
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  double tolAbs = 1e-9;
  std::size_t maxDim = 0;  // 0: default/env
  std::size_t trials = 10000;
  unsigned threads = 0;
  bool corruptMargins = false;
  // angles
  std::string instanceFile;
  // zeno
  std::size_t zenoSteps = 10;
  double zenoEpsMax = 1e-3;
  std::size_t zenoFamilyDim = 4;
  // decode
  std::string channelFile;
  std::size_t blockLength = 8;
  double rate = 0.3;
  double delta = 0.1;
  std::size_t decodeTrials = 500;
  std::string mode = "exact";
  // hunt
  std::string boundName = "T1B";
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "master seed for every random stream");
  sub->add_option("--out", o.out, "output file path");
  sub->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--tol", o.tolAbs, "absolute validation tolerance");
  sub->add_option("--max-dim", o.maxDim,
                  "dimension cap (overrides QUBOUND_MAX_DIM)");
  sub->add_option("--threads", o.threads, "worker threads (0 = hardware)");
}

std::int64_t now_seconds() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

Json tolerances_json(const qub::Tolerances& tol) {
  return Json{{"abs", tol.abs},
              {"hermitianGate", tol.hermitianGate},
              {"eigReconstruction", tol.eigReconstruction},
              {"probFloor", tol.probFloor},
              {"violation", tol.violation}};
}

Json limits_json(const qub::ResourceLimits& limits) {
  return Json{{"maxDim", limits.maxDim},
              {"maxDenseDim", limits.maxDenseDim},
              {"maxCodebookEntries", limits.maxCodebookEntries},
              {"maxCodebookCells", limits.maxCodebookCells}};
}

std::string generator_name(qub::BoundId id) {
  using qub::BoundId;
  switch (id) {
    case BoundId::T1A:
    case BoundId::T1B:
      return "random projector chains, 50% mixed initial states";
    case BoundId::Sen:
      return "random projector chains, 50% mixed, 40% of mixed subnormalized";
    case BoundId::Corollary1:
      return "random projector families including rank 0 and full rank";
    case BoundId::Wilde4th:
      return "small-disturbance chains with sum eps <= 0.01";
    case BoundId::Lemma1Step:
      return "random pure chains";
    case BoundId::Lemma2Step:
      return "random pure chains, half in the small-disturbance regime";
    case BoundId::AppendixBW:
      return "normalized random angle vectors with sum sin^2 alpha <= 1/2";
    case BoundId::HayashiNagaoka:
      return "random effect + scaled Wishart T, 30% pushed to a subspace";
    case BoundId::PovmRepeat:
      return "random effect and state, repetition count in [1, 10]";
  }
  return "unknown";
}

void emit(const Json& report, const std::string& outPath) {
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!outPath.empty()) qub::save_text_file(outPath, text);
}

Json base_config(const Options& o, const qub::Tolerances& tol,
                 const qub::ResourceLimits& limits) {
  return Json{{"seed", o.seed},
              {"format", o.format},
              {"threads", o.threads},
              {"tolerances", tolerances_json(tol)},
              {"limits", limits_json(limits)}};
}

int cmd_verify(const Options& o, const qub::Tolerances& tol,
               const qub::ResourceLimits& limits) {
  Json bounds = Json::array();
  bool violation = false;
  if (o.trials > 0) {
    for (qub::BoundId id : qub::all_bounds()) {
      qub::HuntConfig cfg = qub::HuntConfig::defaults_for(id);
      cfg.trials = o.trials;
      cfg.seed = o.seed;
      cfg.threads = o.threads;
      cfg.tol = tol;
      cfg.maxDim = static_cast<qub::Index>(
          std::min<std::size_t>(cfg.maxDim, limits.maxDim));
      qub::HuntSummary summary = qub::hunt_violations(cfg);
      if (o.corruptMargins) {
        summary.minMargin = -std::abs(summary.minMargin) - 1.0;
        summary.violations += 1;
        summary.violationFound = true;
      }
      violation = violation || summary.violationFound;
      Json sj = qub::hunt_summary_to_json(summary);
      sj["generator"] = generator_name(id);
      if (o.corruptMargins) sj["corrupted"] = true;
      bounds.push_back(std::move(sj));
    }
  }
  Json config = base_config(o, tol, limits);
  config["trials"] = o.trials;
  config["corruptMargins"] = o.corruptMargins;
  Json report{{"command", "verify"},
              {"timestamp", now_seconds()},
              {"config", std::move(config)},
              {"bounds", std::move(bounds)},
              {"violationFound", violation},
              {"senT1bCrossover", qub::sen_t1b_crossover()}};
  emit(report, o.out);
  return violation ? kViolation : kOk;
}

int cmd_hunt(const Options& o, const qub::Tolerances& tol,
             const qub::ResourceLimits& limits) {
  const auto id = qub::bound_from_string(o.boundName);
  if (!id) {
    std::cerr << "unknown bound \"" << o.boundName << "\"\n";
    return kUsage;
  }
  qub::HuntConfig cfg = qub::HuntConfig::defaults_for(*id);
  cfg.trials = o.trials;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.tol = tol;
  cfg.maxDim = static_cast<qub::Index>(
      std::min<std::size_t>(cfg.maxDim, limits.maxDim));
  const qub::HuntSummary summary = qub::hunt_violations(cfg);
  Json config = base_config(o, tol, limits);
  config["trials"] = o.trials;
  config["bound"] = std::string(qub::to_string(*id));
  config["generator"] = generator_name(*id);
  Json report{{"command", "hunt"},
              {"timestamp", now_seconds()},
              {"config", std::move(config)},
              {"summary", qub::hunt_summary_to_json(summary)}};
  emit(report, o.out);
  return summary.violationFound ? kViolation : kOk;
}

int cmd_angles(const Options& o, const qub::Tolerances& tol,
               const qub::ResourceLimits& limits) {
  const Json instance = qub::load_json_file(o.instanceFile);
  qub::MeasurementChain chain = qub::chain_from_json(instance, limits, tol);
  if (!chain.pure()) {
    // A density input that is numerically pure still has a well-defined
    // angle record; recover the vector before handing it over.
    const auto& rho = std::get<qub::DensityOperator>(chain.initial);
    const double purity =
        (rho.matrix() * rho.matrix()).trace().real() /
        (rho.trace() * rho.trace());
    if (purity >= 1.0 - 1e-9 && std::abs(rho.trace() - 1.0) <= tol.abs) {
      const qub::EigenDecomposition eig = qub::hermitian_eig(rho.matrix(), tol);
      qub::ComplexVector top = eig.eigenvectors.col(eig.eigenvectors.cols() - 1);
      chain = qub::MeasurementChain(chain.projectors,
                                    qub::PureState(std::move(top), tol), limits);
    }
  }
  const qub::ChainTrace trace =
      qub::extract_angles(chain, {false, tol});
  Json report = qub::trace_to_json(trace);
  report["command"] = "angles";
  report["timestamp"] = now_seconds();
  Json config = base_config(o, tol, limits);
  config["instance"] = o.instanceFile;
  report["config"] = std::move(config);
  emit(report, o.out);
  return kOk;
}

int cmd_zeno(const Options& o, const qub::Tolerances& tol,
             const qub::ResourceLimits& limits) {
  const std::size_t n = o.zenoSteps;
  if (n == 0) {
    std::cerr << "zeno: --n must be >= 1\n";
    return kUsage;
  }

  // Equiangular qubit walk against its closed form.
  std::vector<qub::Projector> ps = qub::equiangular_qubit_chain(n);
  qub::ComplexVector e0 = qub::ComplexVector::Zero(2);
  e0[0] = 1.0;
  qub::MeasurementChain chain(std::move(ps), qub::PureState(e0, tol), limits);
  const double direct = qub::chain_success_probability(chain);
  const double closed =
      std::pow(std::cos(std::numbers::pi / (2.0 * static_cast<double>(n))),
               2.0 * static_cast<double>(n));
  Json equiangular{{"n", n},
                   {"success", direct},
                   {"closedForm", closed},
                   {"absoluteError", std::abs(direct - closed)}};
  try {
    const qub::ChainTrace trace = qub::run_chain(chain, {false, tol});
    equiangular["margins"] =
        Json{{"T1A", qub::check_t1a(trace, tol).margin},
             {"T1B", qub::check_t1b(trace, tol).margin},
             {"SEN", qub::check_sen(trace, tol).margin}};
    equiangular["epsilonSum"] = trace.epsilon_sum();
  } catch (const qub::VanishingBranchError& err) {
    equiangular["vanishingBranch"] = true;
    equiangular["vanishingStep"] = err.step();
  }

  // Random small-disturbance family with the full bound set.
  qub::RngStream rng(o.seed, 0);
  qub::PureState psi =
      qub::random_pure_state(static_cast<qub::Index>(o.zenoFamilyDim), rng);
  qub::ZenoFamily family = qub::zeno_family(psi, n, o.zenoEpsMax, rng);
  qub::MeasurementChain famChain(family.projectors, psi, limits);
  const qub::ChainTrace famTrace = qub::run_chain(famChain, {false, tol});
  const qub::ChainTrace famBack = qub::run_back_and_forth(famChain, {false, tol});
  Json familyReport{{"dim", o.zenoFamilyDim},
                    {"n", n},
                    {"epsMax", o.zenoEpsMax},
                    {"epsilonSum", famTrace.epsilon_sum()},
                    {"success", famTrace.successProbability},
                    {"traceDistance", famTrace.traceDistance},
                    {"margins",
                     Json{{"T1A", qub::check_t1a(famTrace, tol).margin},
                          {"T1B", qub::check_t1b(famTrace, tol).margin},
                          {"SEN", qub::check_sen(famTrace, tol).margin},
                          {"WILDE4TH", qub::check_wilde4th(famBack, tol).margin}}}};

  Json config = base_config(o, tol, limits);
  config["n"] = n;
  config["epsMax"] = o.zenoEpsMax;
  config["familyDim"] = o.zenoFamilyDim;
  Json report{{"command", "zeno"},
              {"timestamp", now_seconds()},
              {"config", std::move(config)},
              {"equiangular", std::move(equiangular)},
              {"family", std::move(familyReport)}};
  emit(report, o.out);
  return kOk;
}

int cmd_decode(const Options& o, const qub::Tolerances& tol,
               const qub::ResourceLimits& limits) {
  const qub::CqChannel channel =
      qub::channel_from_json(qub::load_json_file(o.channelFile), tol);
  Json warnings = Json::array();
  const double classicalCap =
      std::log2(static_cast<double>(channel.alphabet_size()));
  if (o.rate > classicalCap + 1e-12) {
    const std::string w = "rate " + std::to_string(o.rate) +
                          " exceeds log2(alphabet) = " +
                          std::to_string(classicalCap) +
                          "; unreachable even classically";
    std::cerr << "warning: " << w << "\n";
    warnings.push_back(w);
  }

  qub::ExperimentConfig cfg;
  cfg.blockLength = o.blockLength;
  cfg.rate = o.rate;
  cfg.delta = o.delta;
  cfg.trials = o.decodeTrials;
  cfg.mode = o.mode == "sampled" ? qub::DecodeMode::Sampled
                                 : qub::DecodeMode::Exact;
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  cfg.limits = limits;
  cfg.tol = tol;

  const qub::DecodeStats stats = qub::decoding_experiment(channel, cfg);
  const std::string csvPath = o.out.empty() ? "decode_stats.csv" : o.out;
  qub::save_text_file(csvPath, qub::decode_stats_csv(stats, cfg));

  Json config = base_config(o, tol, limits);
  config["channel"] = o.channelFile;
  config["n"] = o.blockLength;
  config["rate"] = o.rate;
  config["delta"] = o.delta;
  config["trials"] = o.decodeTrials;
  config["mode"] = o.mode;
  Json report{{"command", "decode"},
              {"timestamp", now_seconds()},
              {"config", std::move(config)},
              {"csvPath", csvPath},
              {"warnings", std::move(warnings)},
              {"summary", qub::decode_stats_summary(stats)}};
  std::cout << report.dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"union-bound checks for sequential projective measurements"};
  app.require_subcommand(1);
  Options o;

  CLI::App* verify = app.add_subcommand(
      "verify", "randomized falsification suite over every bound");
  add_common(verify, o);
  verify->add_option("--trials", o.trials, "trials per bound (0 = skip all)");
  verify->add_flag("--corrupt-margins", o.corruptMargins)->group("");

  CLI::App* angles = app.add_subcommand(
      "angles", "trigonometric record of a pure chain instance");
  add_common(angles, o);
  angles->add_option("--instance", o.instanceFile, "chain instance JSON file")
      ->required();

  CLI::App* zeno = app.add_subcommand(
      "zeno", "small-disturbance chains against closed forms");
  add_common(zeno, o);
  zeno->add_option("--n", o.zenoSteps, "number of steps");
  zeno->add_option("--eps-max", o.zenoEpsMax, "per-step eps cap for the family");
  zeno->add_option("--family-dim", o.zenoFamilyDim, "family dimension");

  CLI::App* decode = app.add_subcommand(
      "decode", "sequential-decoding experiment on a cq channel");
  add_common(decode, o);
  decode->add_option("--channel", o.channelFile, "channel JSON file")
      ->required();
  decode->add_option("--n", o.blockLength, "block length");
  decode->add_option("--rate", o.rate, "code rate in bits per symbol");
  decode->add_option("--delta", o.delta, "typicality width");
  decode->add_option("--trials", o.decodeTrials, "number of trials");
  decode->add_option("--mode", o.mode, "exact or sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));

  CLI::App* hunt = app.add_subcommand(
      "hunt", "randomized falsification search for one bound");
  add_common(hunt, o);
  hunt->add_option("--bound", o.boundName, "bound identifier")->required();
  hunt->add_option("--trials", o.trials, "number of trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  qub::Tolerances tol = qub::default_tolerances();
  tol.abs = o.tolAbs;
  qub::ResourceLimits limits = qub::default_limits();
  if (const char* env = std::getenv("QUBOUND_MAX_DIM")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || v == 0) {
      std::cerr << "QUBOUND_MAX_DIM must be a positive integer, got \"" << env
                << "\"\n";
      return kUsage;
    }
    limits.maxDim = static_cast<std::size_t>(v);
  }
  if (o.maxDim > 0) limits.maxDim = o.maxDim;
  if (o.format == "csv" && !decode->parsed()) {
    std::cerr << "--format csv applies to decode sweeps only\n";
    return kUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(o, tol, limits);
    if (angles->parsed()) return cmd_angles(o, tol, limits);
    if (zeno->parsed()) return cmd_zeno(o, tol, limits);
    if (decode->parsed()) return cmd_decode(o, tol, limits);
    if (hunt->parsed()) return cmd_hunt(o, tol, limits);
  } catch (const qub::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kResource;
  } catch (const qub::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return kUsage;
}
