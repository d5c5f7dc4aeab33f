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

// End-to-end gate: one check per release criterion, each printed as a single
// [PASS]/[FAIL] line with the measured numbers. Returns the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qub/bounds.hpp"
#include "qub/json_io.hpp"
#include "qub/seqdecode.hpp"

using namespace qub;

namespace {

const double kPi = std::acos(-1.0);

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

PureState ket0() {
  ComplexVector v(2);
  v << 1.0, 0.0;
  return PureState(v);
}

MeasurementChain random_instance(RngStream& rng, bool mixed) {
  const Index d = 2 + static_cast<Index>(rng.below(7));
  const std::size_t n = 1 + rng.below(8);
  std::vector<Projector> ps;
  for (std::size_t i = 0; i < n; ++i)
    ps.push_back(random_projector(d, 1 + static_cast<Index>(rng.below(d)), rng));
  if (mixed)
    return MeasurementChain(std::move(ps),
                            random_density(d, 1 + static_cast<Index>(rng.below(d)), rng));
  return MeasurementChain(std::move(ps), random_pure_state(d, rng));
}

MeasurementChain small_disturbance_chain(RngStream& rng) {
  const Index d = 2 + static_cast<Index>(rng.below(7));
  const std::size_t n = 2 + rng.below(7);
  const double epsMax = 0.5 * (0.1 + 0.85 * rng.uniform()) / static_cast<double>(n);
  const PureState psi = random_pure_state(d, rng);
  ZenoFamily fam = zeno_family(psi, n, epsMax, rng);
  return MeasurementChain(std::move(fam.projectors), psi);
}

DensityOperator ket0_density() {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  return DensityOperator::make(m);
}

DensityOperator plus_density() {
  ComplexMatrix m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  return DensityOperator::make(m);
}

CqChannel binary_channel() {
  return CqChannel({0.5, 0.5}, {ket0_density(), plus_density()});
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// 1. Distance union bound on 10^4 random chains, pure and mixed, the mixed
// ones additionally through the purification route; two-minute budget.
Verdict criterion1() {
  const auto start = std::chrono::steady_clock::now();
  double minMargin = 1e300;
  std::size_t evaluated = 0, attempts = 0;
  while (evaluated < 10000 && attempts < 30000) {
    RngStream rng(1001, attempts++);
    const bool mixed = (attempts % 2) == 0;
    try {
      const MeasurementChain chain = random_instance(rng, mixed);
      const BoundReport direct = check_t1a(run_chain(chain));
      minMargin = std::min(minMargin, direct.margin);
      if (mixed) {
        const BoundReport lifted = check_t1a(run_chain(purified_chain(chain)));
        minMargin = std::min(minMargin, lifted.margin);
      }
      ++evaluated;
    } catch (const VanishingBranchError&) {
    }
  }
  const double elapsed = seconds_since(start);
  const bool pass = evaluated >= 10000 && minMargin >= -1e-9 && elapsed <= 120.0;
  return {pass, "instances=" + std::to_string(evaluated) +
                    " minMargin=" + fmt(minMargin) + " elapsed=" + fmt(elapsed) + "s"};
}

// 2. The single |+> measurement of |0> saturates the distance bound.
Verdict criterion2() {
  ComplexMatrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const ChainTrace trace =
      run_chain(MeasurementChain({Projector(plus)}, ket0()));
  const double gap =
      std::abs(trace.traceDistance - 2.0 * std::sqrt(trace.epsilon_sum()));
  const double fromSqrt2 = std::abs(trace.traceDistance - std::sqrt(2.0));
  const bool pass = gap <= 1e-12 && fromSqrt2 <= 1e-12;
  return {pass, "D=" + fmt(trace.traceDistance) + " |D-2sqrt(eps)|=" + fmt(gap)};
}

// 3. Success union bound, its operator form, and the state specialization.
Verdict criterion3() {
  double minSuccessMargin = 1e300, minOperatorMargin = 1e300, worstGap = 0.0;
  std::size_t evaluated = 0, attempts = 0;
  while (evaluated < 10000 && attempts < 30000) {
    RngStream rng(1003, attempts++);
    const bool mixed = (attempts % 2) == 0;
    try {
      const MeasurementChain chain = random_instance(rng, mixed);
      const ChainTrace trace = run_chain(chain);
      minSuccessMargin = std::min(minSuccessMargin, check_t1b(trace).margin);
      minOperatorMargin =
          std::min(minOperatorMargin, check_corollary1(chain.projectors).margin);
      worstGap = std::max(worstGap,
                          std::abs(trace.directSuccessProbability -
                                   trace.successProbability));
      ++evaluated;
    } catch (const VanishingBranchError&) {
    }
  }
  const bool pass = evaluated >= 10000 && minSuccessMargin >= -1e-9 &&
                    minOperatorMargin >= -1e-9 && worstGap <= 1e-9;
  return {pass, "instances=" + std::to_string(evaluated) +
                    " minSuccessMargin=" + fmt(minSuccessMargin) +
                    " minEig=" + fmt(minOperatorMargin) +
                    " specializationGap=" + fmt(worstGap)};
}

// 4. Angle recursion lemmas on 10^4 small-disturbance chains plus the
// one-variable minimizer scan on 100 random angle vectors.
Verdict criterion4() {
  double minMargin = 1e300;
  std::size_t evaluated = 0, attempts = 0, skips = 0;
  while (evaluated < 10000 && attempts < 30000) {
    RngStream rng(1004, attempts++);
    try {
      const ChainTrace trace = run_chain(small_disturbance_chain(rng));
      for (const BoundReport& r : check_lemma1(trace))
        minMargin = std::min(minMargin, r.margin);
      for (const BoundReport& r : check_lemma2(trace)) {
        if (r.skipped) {
          ++skips;
          continue;
        }
        minMargin = std::min(minMargin, r.margin);
      }
      const BoundReport w = check_appendixB_W(trace.alphas);
      if (w.skipped)
        ++skips;
      else
        minMargin = std::min(minMargin, w.margin);
      ++evaluated;
    } catch (const VanishingBranchError&) {
    }
  }

  bool scanOk = true;
  double worstScanGap = -1e300;
  for (std::size_t t = 0; t < 100; ++t) {
    RngStream rng(1044, t);
    const AngleVector angles =
        AngleVector::from_trace(run_chain(small_disturbance_chain(rng)));
    for (std::size_t k = 1; k < angles.length(); ++k) {
      const Lemma2Scan scan = lemma2_minimizer_scan(k, angles, 10000);
      scanOk = scanOk && scan.gridAbovePrev;
      worstScanGap = std::max(worstScanGap, scan.aPrev - scan.gridMin);
    }
  }

  const bool pass =
      evaluated >= 10000 && skips == 0 && minMargin >= -1e-8 && scanOk;
  return {pass, "chains=" + std::to_string(evaluated) +
                    " minMargin=" + fmt(minMargin) +
                    " skips=" + std::to_string(skips) +
                    " worstScanGap=" + fmt(worstScanGap)};
}

// 5. Equiangular chain against its closed form for N in {1, 10, 100}.
Verdict criterion5() {
  double worst = 0.0;
  double valueAt10 = 0.0;
  for (std::size_t n : {std::size_t{1}, std::size_t{10}, std::size_t{100}}) {
    const MeasurementChain chain(equiangular_qubit_chain(n), ket0());
    const double direct = chain_success_probability(chain);
    const double closed =
        std::pow(std::cos(kPi / (2.0 * static_cast<double>(n))),
                 2.0 * static_cast<double>(n));
    worst = std::max(worst, std::abs(direct - closed));
    if (n == 10) valueAt10 = direct;
    if (n > 1) {
      const double stepped = run_chain(chain).successProbability;
      worst = std::max(worst, std::abs(stepped - closed));
    }
  }
  return {worst <= 1e-12,
          "maxError=" + fmt(worst) + " successAtN10=" + fmt(valueAt10)};
}

// 6. Crossover of the two success bounds at 1/4, and their gap at 0.01.
Verdict criterion6() {
  const double crossover = sen_t1b_crossover();
  const double gridResolution = 1.0 / 1024.0;
  const double x = 0.01;
  const double diff = (1.0 - 4.0 * x) - (1.0 - 2.0 * std::sqrt(x));
  const bool pass = std::abs(crossover - 0.25) <= gridResolution &&
                    std::abs(diff - 0.16) <= 1e-15;
  return {pass, "crossover=" + fmt(crossover) + " gapAt0.01=" + fmt(diff)};
}

// 7. Operator smoothing inequality over 10^4 random pairs, plus both
// decoder operator bounds on fresh decoding instances.
Verdict criterion7() {
  HuntConfig cfg = HuntConfig::defaults_for(BoundId::HayashiNagaoka);
  cfg.trials = 10000;
  cfg.seed = 1007;
  const HuntSummary hunt = hunt_violations(cfg);

  const CqChannel ch = binary_channel();
  const TypicalSpec spec{6, 0.15};
  double minPgm = 1e300, minSeq = 1e300;
  for (std::size_t t = 0; t < 60; ++t) {
    RngStream rng(1077, t);
    const Codebook cb = random_codebook(ch, 6, 0.3, rng);
    const std::size_t m = rng.below(cb.size());
    minPgm = std::min(minPgm, pgm_decode(ch, cb, m, spec).operatorMargin);
    minSeq = std::min(minSeq, sequential_operator_margin(ch, cb, m, spec));
  }

  const bool pass = hunt.evaluated >= 10000 && hunt.minMargin >= -1e-8 &&
                    minPgm >= -1e-8 && minSeq >= -1e-8;
  return {pass, "huntMin=" + fmt(hunt.minMargin) + " pgmMin=" + fmt(minPgm) +
                    " seqMin=" + fmt(minSeq)};
}

// 8. Typicality audit for sigma = diag(0.9, 0.1), n = 5, delta = 0.3, with
// the projector rank checked against exhaustive enumeration.
Verdict criterion8() {
  const DensityOperator sigma =
      DensityOperator::make([] {
        ComplexMatrix m = ComplexMatrix::Zero(2, 2);
        m(0, 0) = 0.9;
        m(1, 1) = 0.1;
        return m;
      }());
  const double entropy = binary_entropy(0.1);

  auto enumerate = [&](double delta) {
    std::size_t count = 0;
    for (int mask = 0; mask < 32; ++mask) {
      double s = 0.0;
      for (int b = 0; b < 5; ++b) s -= std::log2((mask >> b) & 1 ? 0.1 : 0.9);
      if (std::abs(s / 5.0 - entropy) <= delta) ++count;
    }
    return count;
  };

  const TypicalSubspace at03 = typical_subspace(sigma, {5, 0.3});
  const bool rankMatch03 =
      at03.rank() == static_cast<Index>(enumerate(0.3));

  const CqChannel single({1.0}, {sigma});
  Codebook cb;
  cb.blockLength = 5;
  cb.rate = 0.0;
  cb.entries = {{0, 0, 0, 0, 0}};
  const TypicalityAudit audit = typicality_audit(single, {5, 0.3}, cb);
  const bool propertiesHold =
      audit.globalRankWithinBound && audit.conditionalRankWithinEmpiricalBound &&
      audit.conditionalRankWithinAveragedBound && audit.eigenvaluesWithinCeiling &&
      audit.eigenvaluesAboveFloor;
  const bool ceilingExact = audit.maxRetainedEigenvalue <= audit.eigenvalueCeiling;

  // Wider window as a non-vacuous cross-check of the same machinery.
  const TypicalSubspace at04 = typical_subspace(sigma, {5, 0.4});
  const bool rankMatch04 = at04.rank() == static_cast<Index>(enumerate(0.4));
  double maxEig = 0.0;
  for (double l : at04.eigenvalues) maxEig = std::max(maxEig, l);
  const bool ceiling04 = maxEig <= std::pow(2.0, -5.0 * (entropy - 0.4));

  const bool pass = rankMatch03 && propertiesHold && ceilingExact &&
                    rankMatch04 && ceiling04;
  return {pass, "rank(0.3)=" + std::to_string(at03.rank()) +
                    " enum=" + std::to_string(enumerate(0.3)) +
                    " rank(0.4)=" + std::to_string(at04.rank()) +
                    " audited eps=" + fmt(audit.epsilon)};
}

// 9. The binary-channel decoding experiment: Holevo oracle, runtime budget,
// and the instance-wise lower bound on every trial.
Verdict criterion9() {
  const auto start = std::chrono::steady_clock::now();
  const CqChannel ch = binary_channel();

  const double chi = holevo_quantity(ch);
  const double oracle = binary_entropy(0.5 * (1.0 + 1.0 / std::sqrt(2.0)));
  const bool chiOk = std::abs(chi - oracle) <= 1e-12 &&
                     std::abs(chi - 0.6009) <= 1e-4;

  ExperimentConfig cfg;
  cfg.blockLength = 8;
  cfg.rate = 0.3;
  cfg.delta = 0.1;
  cfg.trials = 500;
  cfg.seed = 1009;
  const DecodeStats stats = decoding_experiment(ch, cfg);

  std::size_t boundHolds = 0;
  for (const DecodeTrialRecord& rec : stats.records)
    if (rec.pcExact >= rec.corollary1Rhs - 1e-9) ++boundHolds;

  const double elapsed = seconds_since(start);
  const bool pass = chiOk && stats.records.size() == 500 &&
                    boundHolds == stats.records.size() && elapsed <= 300.0;
  return {pass, "chi=" + fmt(chi) + " errorRate=" + fmt(stats.empiricalErrorRate) +
                    " paperRHS=" + fmt(stats.boundRHS_paper) +
                    " senRHS=" + fmt(stats.boundRHS_sen) +
                    " boundHolds=" + std::to_string(boundHolds) + "/500" +
                    " elapsed=" + fmt(elapsed) + "s"};
}

// 10. Repeated-effect bound over 10^4 random (E, rho, m) triples.
Verdict criterion10() {
  HuntConfig cfg = HuntConfig::defaults_for(BoundId::PovmRepeat);
  cfg.trials = 10000;
  cfg.seed = 1010;
  const HuntSummary hunt = hunt_violations(cfg);
  const bool pass = hunt.evaluated >= 10000 && hunt.minMargin >= -1e-9 &&
                    hunt.violations == 0;
  return {pass, "evaluated=" + std::to_string(hunt.evaluated) +
                    " minMargin=" + fmt(hunt.minMargin)};
}

// 11. Two identically seeded verify runs agree byte for byte once the
// timestamp line is dropped.
Verdict criterion11() {
  const std::string cli = QUBOUND_CLI_PATH;
  auto capture = [&](const std::string& path) {
    const std::string cmd =
        cli + " verify --trials 200 --seed 123 > " + path + " 2>/dev/null";
    return std::system(cmd.c_str());
  };
  const int rc1 = capture("/tmp/qub_accept_a.json");
  const int rc2 = capture("/tmp/qub_accept_b.json");

  auto stripped = [](const std::string& path) {
    std::ifstream in(path);
    std::ostringstream out;
    for (std::string line; std::getline(in, line);)
      if (line.find("\"timestamp\"") == std::string::npos) out << line << '\n';
    return out.str();
  };
  const std::string a = stripped("/tmp/qub_accept_a.json");
  const std::string b = stripped("/tmp/qub_accept_b.json");
  std::remove("/tmp/qub_accept_a.json");
  std::remove("/tmp/qub_accept_b.json");

  const bool pass = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
  return {pass, "bytes=" + std::to_string(a.size()) +
                    (a == b ? " identical" : " DIFFER")};
}

}  // namespace

int main() {
  struct Entry {
    int number;
    const char* title;
    std::function<Verdict()> check;
  };
  const std::vector<Entry> entries = {
      {1, "distance union bound on random chains", criterion1},
      {2, "distance bound tightness at the |0>,|+> instance", criterion2},
      {3, "success union bound, operator form, specialization", criterion3},
      {4, "angle recursion lemmas and minimizer scan", criterion4},
      {5, "equiangular closed form N in {1,10,100}", criterion5},
      {6, "success-bound crossover and 0.01 gap", criterion6},
      {7, "operator smoothing and decoder operator bounds", criterion7},
      {8, "typicality audit vs exhaustive enumeration", criterion8},
      {9, "binary-channel decoding experiment", criterion9},
      {10, "repeated-effect bound", criterion10},
      {11, "verify determinism modulo timestamp", criterion11},
  };

  int failures = 0;
  for (const Entry& e : entries) {
    Verdict v;
    try {
      v = e.check();
    } catch (const std::exception& ex) {
      v = {false, std::string("exception: ") + ex.what()};
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "[PASS]" : "[FAIL]") << " criterion " << e.number
              << ": " << e.title << " (" << v.detail << ")\n";
  }
  std::cout << (failures == 0 ? "ALL CRITERIA PASS"
                              : std::to_string(failures) + " CRITERIA FAILED")
            << std::endl;
  return failures;
}
