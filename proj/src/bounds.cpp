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

#include "qub/bounds.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <utility>

namespace qub {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double sin_square(double angle) {
  const double s = std::sin(angle);
  return s * s;
}

BoundReport make_report(BoundId id, double lhs, double rhs,
                        const Tolerances& tol, Json meta = Json::object()) {
  BoundReport report;
  report.bound = id;
  report.lhs = lhs;
  report.rhs = rhs;
  report.margin = lhs - rhs;
  report.satisfied = report.margin >= -tol.violation;
  report.meta = std::move(meta);
  return report;
}

BoundReport skipped_report(BoundId id, std::string reason) {
  BoundReport report;
  report.bound = id;
  report.skipped = true;
  report.meta = Json{{"reason", std::move(reason)}};
  return report;
}

Json chain_meta(const ChainTrace& trace) {
  return Json{{"dim", trace.dim},
              {"pure", trace.pure},
              {"backAndForth", trace.backAndForth},
              {"initialTrace", trace.initialTrace},
              {"epsilonSum", trace.epsilon_sum()},
              {"executedEpsilonSum", trace.executed_epsilon_sum()}};
}

ComplexMatrix pinv_sqrt_psd(const ComplexMatrix& a, const Tolerances& tol) {
  const EigenDecomposition eig = hermitian_eig(a, tol);
  const double cutoff =
      std::max(0.0, 1e-12 * std::max(0.0, eig.eigenvalues.maxCoeff()));
  RealVector mapped(eig.eigenvalues.size());
  for (Index i = 0; i < mapped.size(); ++i) {
    mapped[i] =
        eig.eigenvalues[i] > cutoff ? 1.0 / std::sqrt(eig.eigenvalues[i]) : 0.0;
  }
  return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace

std::string_view to_string(BoundId id) {
  switch (id) {
    case BoundId::T1A: return "T1A";
    case BoundId::T1B: return "T1B";
    case BoundId::Corollary1: return "COROLLARY1";
    case BoundId::Sen: return "SEN";
    case BoundId::Wilde4th: return "WILDE4TH";
    case BoundId::Lemma1Step: return "LEMMA1_STEP";
    case BoundId::Lemma2Step: return "LEMMA2_STEP";
    case BoundId::AppendixBW: return "APPENDIX_B_W";
    case BoundId::HayashiNagaoka: return "HAYASHI_NAGAOKA";
    case BoundId::PovmRepeat: return "POVM_REPEAT";
  }
  return "UNKNOWN";
}

std::optional<BoundId> bound_from_string(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (BoundId id : all_bounds()) {
    if (upper == to_string(id)) return id;
  }
  return std::nullopt;
}

std::vector<BoundId> all_bounds() {
  return {BoundId::T1A,        BoundId::T1B,
          BoundId::Corollary1, BoundId::Sen,
          BoundId::Wilde4th,   BoundId::Lemma1Step,
          BoundId::Lemma2Step, BoundId::AppendixBW,
          BoundId::HayashiNagaoka, BoundId::PovmRepeat};
}

Json report_to_json(const BoundReport& report) {
  Json j{{"bound", std::string(to_string(report.bound))},
         {"lhs", report.lhs},
         {"rhs", report.rhs},
         {"margin", report.margin},
         {"satisfied", report.satisfied},
         {"meta", report.meta}};
  if (report.skipped) j["skipped"] = true;
  return j;
}

AngleVector AngleVector::from_trace(const ChainTrace& trace) {
  if (!trace.pure || trace.alphas.empty()) {
    throw ValidationError(
        "AngleVector: trace has no angle data (mixed initial state?)");
  }
  AngleVector av;
  av.alphas = trace.alphas;
  av.thetas = trace.thetas;
  av.betas.reserve(trace.betas.size() + 1);
  av.betas.push_back(0.0);
  av.betas.insert(av.betas.end(), trace.betas.begin(), trace.betas.end());
  return av;
}

double AngleVector::sin_alpha_square_sum() const {
  double s = 0.0;
  for (double a : alphas) s += sin_square(a);
  return s;
}

BoundReport check_t1a(const ChainTrace& trace, const Tolerances& tol) {
  const double sum = trace.executed_epsilon_sum();
  const double lhs = 2.0 * std::sqrt(std::max(0.0, sum));
  return make_report(BoundId::T1A, lhs, trace.traceDistance, tol,
                     chain_meta(trace));
}

BoundReport check_t1b(const ChainTrace& trace, const Tolerances& tol) {
  const double sum = trace.executed_epsilon_sum();
  const double rhs = 1.0 - 4.0 * sum;
  Json meta = chain_meta(trace);
  if (rhs < 0.0) meta["vacuous"] = true;
  return make_report(BoundId::T1B, trace.successProbability, rhs, tol,
                     std::move(meta));
}

BoundReport check_corollary1(const std::vector<Projector>& projectors,
                             const Tolerances& tol) {
  if (projectors.empty()) {
    throw ValidationError("check_corollary1: need at least one projector");
  }
  const Index d = projectors.front().dim();
  for (const Projector& p : projectors) {
    if (p.dim() != d) {
      throw ShapeError("check_corollary1: projector dimensions differ");
    }
  }
  ComplexMatrix a = projectors.front().matrix();
  for (std::size_t i = 1; i < projectors.size(); ++i) {
    a = projectors[i].matrix() * a;
  }
  const ComplexMatrix eye = ComplexMatrix::Identity(d, d);
  ComplexMatrix diff = a.adjoint() * a - eye;
  for (const Projector& p : projectors) {
    diff += 4.0 * (eye - p.matrix());
  }
  diff = 0.5 * (diff + diff.adjoint().eval());
  const double lhs = min_hermitian_eigenvalue(diff, tol);
  return make_report(
      BoundId::Corollary1, lhs, 0.0, tol,
      Json{{"dim", d}, {"count", projectors.size()}});
}

BoundReport check_sen(const ChainTrace& trace, const Tolerances& tol) {
  // tr(complement * rho) per executed step; for a unit-trace input this is
  // exactly the step's epsilon, for a subnormalized input it is smaller by
  // the trace deficit.
  const double deficit = 1.0 - trace.initialTrace;
  double mass = 0.0;
  for (double eps : trace.epsilons) {
    mass += std::max(0.0, eps - deficit);
  }
  if (trace.backAndForth && !trace.epsilons.empty()) {
    for (std::size_t i = 0; i + 1 < trace.epsilons.size(); ++i) {
      mass += std::max(0.0, trace.epsilons[i] - deficit);
    }
  }
  const double rhs = trace.initialTrace - 2.0 * std::sqrt(mass);
  Json meta = chain_meta(trace);
  meta["complementMass"] = mass;
  return make_report(BoundId::Sen, trace.successProbability, rhs, tol,
                     std::move(meta));
}

BoundReport check_wilde4th(const ChainTrace& trace, const Tolerances& tol) {
  if (!trace.backAndForth) {
    throw ValidationError("check_wilde4th: needs a back-and-forth trace");
  }
  const double sum = std::max(0.0, trace.epsilon_sum());
  const double lhs = std::pow(sum, 0.25);
  Json meta = chain_meta(trace);
  if (trace.forwardTraceDistance) {
    meta["forwardTraceDistance"] = *trace.forwardTraceDistance;
    meta["forwardT1AMargin"] =
        2.0 * std::sqrt(sum) - *trace.forwardTraceDistance;
  }
  return make_report(BoundId::Wilde4th, lhs, trace.traceDistance, tol,
                     std::move(meta));
}

std::vector<BoundReport> check_lemma1(const ChainTrace& trace,
                                      const Tolerances& tol) {
  if (!trace.pure || trace.alphas.empty()) {
    throw ValidationError("check_lemma1: pure trace with angles required");
  }
  std::vector<BoundReport> reports;
  reports.reserve(trace.alphas.size());
  for (std::size_t j = 0; j < trace.alphas.size(); ++j) {
    const double prevBeta = j == 0 ? 0.0 : trace.betas[j - 1];
    const double lhs = sin_square(prevBeta) + sin_square(trace.alphas[j]);
    const double rhs = sin_square(trace.betas[j]);
    reports.push_back(make_report(BoundId::Lemma1Step, lhs, rhs, tol,
                                  Json{{"step", j + 1}}));
  }
  return reports;
}

double lemma2_a(std::size_t k, const AngleVector& angles) {
  const std::size_t n = angles.length();
  if (n == 0) {
    throw ValidationError("lemma2_a: empty angle vector");
  }
  if (angles.betas.size() != n + 1) {
    throw ValidationError(
        "lemma2_a: betas must include beta_0 (expected N + 1 entries)");
  }
  if (k >= n) {
    throw ValidationError("lemma2_a: index " + std::to_string(k) +
                          " outside [0, N-1]");
  }
  // 1-based inclusive partial sums of sin^2 alpha.
  const auto tail = [&](std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i <= to && i <= n; ++i) {
      s += sin_square(angles.alphas[i - 1]);
    }
    return s;
  };
  const double tailAll = tail(k + 1, n);
  const double tailHead = tail(k + 1, n - 1);
  const double cosAN = std::cos(angles.alphas[n - 1]);
  const double cosB = std::cos(angles.betas[k]);
  const double sinB2 = sin_square(angles.betas[k]);
  const double numerator =
      cosAN * cosB - std::sqrt(tailAll) * std::sqrt(sinB2 + tailHead);
  return numerator / (1.0 + tailHead);
}

std::vector<BoundReport> check_lemma2(const ChainTrace& trace,
                                      const Tolerances& tol) {
  const AngleVector angles = AngleVector::from_trace(trace);
  const double sum = angles.sin_alpha_square_sum();
  if (sum > 0.5) {
    return {skipped_report(BoundId::Lemma2Step,
                           "sum sin^2 alpha = " + std::to_string(sum) +
                               " exceeds 1/2")};
  }
  std::vector<BoundReport> reports;
  for (std::size_t k = 1; k < angles.length(); ++k) {
    const double lhs = std::cos(angles.thetas[k - 1]) * lemma2_a(k, angles);
    const double rhs = lemma2_a(k - 1, angles);
    reports.push_back(
        make_report(BoundId::Lemma2Step, lhs, rhs, tol, Json{{"k", k}}));
  }
  return reports;
}

Lemma2Scan lemma2_minimizer_scan(std::size_t k, const AngleVector& angles,
                                 std::size_t gridSize) {
  const std::size_t n = angles.length();
  if (k == 0 || k >= n) {
    throw ValidationError("lemma2_minimizer_scan: k must be in [1, N-1]");
  }
  if (gridSize < 2) {
    throw ValidationError("lemma2_minimizer_scan: grid needs >= 2 points");
  }
  const auto tail = [&](std::size_t from, std::size_t to) {
    double s = 0.0;
    for (std::size_t i = from; i <= to && i <= n; ++i) {
      s += sin_square(angles.alphas[i - 1]);
    }
    return s;
  };
  const double prefactor2 = tail(k + 1, n);    // under the outer square root
  const double quad = tail(k, n - 1);          // x^2 coefficient is -(1+quad)
  const double shift = tail(k + 1, n - 1);     // radicand constant, denominator
  const double total = tail(k, n);
  const double cosAN = std::cos(angles.alphas[n - 1]);
  const double sinAk = std::sin(angles.alphas[k - 1]);
  const double cosB = std::cos(angles.betas[k - 1]);
  const double sinB2 = sin_square(angles.betas[k - 1]);
  const double denom = 1.0 + shift;

  const auto radicand = [&](double x) {
    return -(1.0 + quad) * x * x + 2.0 * x * cosB * sinAk + shift + sinB2;
  };
  const auto g = [&](double x) {
    double root = 0.0;
    if (prefactor2 > 0.0) {
      const double r = radicand(x);
      if (r < -1e-12) return kNaN;
      root = std::sqrt(prefactor2) * std::sqrt(std::max(0.0, r));
    }
    return (cosAN * cosB - x * cosAN * sinAk - root) / denom;
  };

  Lemma2Scan scan;
  scan.k = k;
  scan.gridSize = gridSize;
  scan.aPrev = lemma2_a(k - 1, angles);
  scan.gridMin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < gridSize; ++j) {
    const double x =
        static_cast<double>(j) / static_cast<double>(gridSize - 1);
    const double value = g(x);
    if (std::isnan(value)) continue;
    if (value < scan.gridMin) {
      scan.gridMin = value;
      scan.gridArgmin = x;
    }
  }
  scan.gridAbovePrev = scan.gridMin >= scan.aPrev - 1e-6;

  if (total > 0.0) {
    scan.closedFormX =
        (cosB * sinAk * total +
         sinAk * cosAN * std::sqrt(total) * std::sqrt(sinB2 + quad)) /
        ((1.0 + quad) * total);
    scan.closedFormInRange =
        scan.closedFormX >= 0.0 && scan.closedFormX <= 1.0 &&
        (prefactor2 == 0.0 || radicand(scan.closedFormX) >= -1e-12);
    if (scan.closedFormInRange) {
      scan.gAtClosedForm = g(scan.closedFormX);
      scan.closedFormMatches = std::abs(scan.gAtClosedForm - scan.aPrev) <= 1e-6;
    }
  }
  return scan;
}

BoundReport check_appendixB_W(const std::vector<double>& alphas,
                              const Tolerances& tol) {
  if (alphas.empty()) {
    throw ValidationError("check_appendixB_W: need at least one angle");
  }
  double sumAll = 0.0;
  for (double a : alphas) sumAll += sin_square(a);
  const double sumHead = sumAll - sin_square(alphas.back());
  if (sumAll > 0.5 + 1e-12) {
    BoundReport report = skipped_report(
        BoundId::AppendixBW,
        "sum sin^2 alpha = " + std::to_string(sumAll) + " exceeds 1/2");
    report.meta["sumSinSquare"] = sumAll;
    return report;
  }
  const double w = std::cos(alphas.back()) -
                   std::sqrt(std::max(0.0, sumAll * sumHead)) -
                   (1.0 - sumAll);

  // The two-fraction rewrite of the same quantity; both fractions vanish with
  // sin^2 alpha_N, which also covers the all-zero case.
  const double last = sin_square(alphas.back());
  double rewrite = 0.0;
  if (last > 0.0) {
    const double r1 =
        last / (1.0 + std::sqrt(std::max(0.0, 1.0 - last / sumAll)));
    const double r2 = last / (1.0 + std::sqrt(std::max(0.0, 1.0 - last)));
    rewrite = r1 - r2;
  }
  return make_report(BoundId::AppendixBW, w, 0.0, tol,
                     Json{{"count", alphas.size()},
                          {"sumSinSquare", sumAll},
                          {"rewrite", rewrite},
                          {"rewriteResidual", std::abs(w - rewrite)}});
}

BoundReport check_hayashi_nagaoka(const Effect& s, const ComplexMatrix& t,
                                  const Tolerances& tol) {
  if (s.dim() != t.rows() || t.rows() != t.cols()) {
    throw ShapeError("check_hayashi_nagaoka: S and T dimensions differ");
  }
  if (!is_hermitian(t, tol.hermitianGate)) {
    throw ValidationError("check_hayashi_nagaoka: T must be Hermitian");
  }
  if (min_hermitian_eigenvalue(t, tol) < -tol.abs) {
    throw ValidationError("check_hayashi_nagaoka: T must be PSD");
  }
  const Index d = s.dim();
  ComplexMatrix st = s.matrix() + t;
  st = 0.5 * (st + st.adjoint().eval());
  const ComplexMatrix inv = pinv_sqrt_psd(st, tol);
  const ComplexMatrix eye = ComplexMatrix::Identity(d, d);
  ComplexMatrix diff = inv * s.matrix() * inv - eye +
                       2.0 * (eye - s.matrix()) + 4.0 * t;
  diff = 0.5 * (diff + diff.adjoint().eval());
  const double lhs = min_hermitian_eigenvalue(diff, tol);
  return make_report(BoundId::HayashiNagaoka, lhs, 0.0, tol,
                     Json{{"dim", d}});
}

BoundReport check_povm_repeat(const Effect& e, const DensityOperator& rho,
                              std::size_t m, const Tolerances& tol) {
  if (m == 0) {
    throw ValidationError("check_povm_repeat: repetition count must be >= 1");
  }
  if (e.dim() != rho.dim()) {
    throw ShapeError("check_povm_repeat: effect and state dimensions differ");
  }
  const double eps = std::clamp(
      1.0 - (e.matrix() * rho.matrix()).trace().real(), 0.0, 1.0);
  const ComplexMatrix powered = hermitian_function(
      e.matrix(),
      [m](double lambda) {
        return std::pow(std::clamp(lambda, 0.0, 1.0),
                        static_cast<double>(m));
      },
      tol);
  const double lhs = (powered * rho.matrix()).trace().real();
  const double rhs = 1.0 - static_cast<double>(m) * eps;
  return make_report(BoundId::PovmRepeat, lhs, rhs, tol,
                     Json{{"m", m}, {"epsilon", eps}});
}

// ---------------------------------------------------------------------------
// Randomized falsification search.

namespace {

struct TrialOutcome {
  double margin = kNaN;  // NaN: instance skipped
  Json instance = Json::object();
};

MeasurementChain random_chain(RngStream& rng, const HuntConfig& cfg,
                              bool allowMixed, double subnormalizedFraction) {
  const Index d = 2 + static_cast<Index>(rng.below(
                          static_cast<std::uint64_t>(cfg.maxDim - 1)));
  const std::size_t n = 1 + static_cast<std::size_t>(rng.below(cfg.maxLength));
  std::vector<Projector> ps;
  ps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Index rank = 1 + static_cast<Index>(
                               rng.below(static_cast<std::uint64_t>(d)));
    ps.push_back(random_projector(d, rank, rng));
  }
  if (!allowMixed || rng.uniform() < 0.5) {
    return MeasurementChain(std::move(ps), random_pure_state(d, rng));
  }
  const Index rank = 1 + static_cast<Index>(
                             rng.below(static_cast<std::uint64_t>(d)));
  DensityOperator rho = random_density(d, rank, rng);
  if (rng.uniform() < subnormalizedFraction) {
    const double tau = 0.3 + 0.6 * rng.uniform();
    rho = DensityOperator::subnormalized(tau * rho.matrix(), cfg.tol);
  }
  return MeasurementChain(std::move(ps), std::move(rho));
}

MeasurementChain zeno_chain(RngStream& rng, const HuntConfig& cfg,
                            double sumEpsCap) {
  const Index d = 2 + static_cast<Index>(rng.below(
                          static_cast<std::uint64_t>(cfg.maxDim - 1)));
  const std::size_t n = 1 + static_cast<std::size_t>(rng.below(cfg.maxLength));
  const double epsMax =
      sumEpsCap * (0.2 + 0.8 * rng.uniform()) / static_cast<double>(n);
  PureState psi = random_pure_state(d, rng);
  ZenoFamily family = zeno_family(psi, n, epsMax, rng);
  return MeasurementChain(std::move(family.projectors), std::move(psi));
}

Json chain_instance_json(const MeasurementChain& chain,
                         const BoundReport& report) {
  return Json{{"chain", chain_to_json(chain)},
              {"report", report_to_json(report)}};
}

double worst_margin(const std::vector<BoundReport>& reports,
                    const BoundReport** worst) {
  double margin = std::numeric_limits<double>::infinity();
  *worst = nullptr;
  for (const BoundReport& r : reports) {
    if (r.skipped) continue;
    if (r.margin < margin) {
      margin = r.margin;
      *worst = &r;
    }
  }
  return margin;
}

TrialOutcome run_trial(const HuntConfig& cfg, std::size_t trial,
                       bool serialize) {
  RngStream rng(cfg.seed, trial);
  TrialOutcome out;
  const RunOptions opts{false, cfg.tol};

  switch (cfg.bound) {
    case BoundId::T1A:
    case BoundId::T1B:
    case BoundId::Sen: {
      const double subFraction = cfg.bound == BoundId::Sen ? 0.4 : 0.0;
      MeasurementChain chain = random_chain(rng, cfg, true, subFraction);
      ChainTrace trace;
      try {
        trace = run_chain(chain, opts);
      } catch (const VanishingBranchError&) {
        return out;
      }
      BoundReport report = cfg.bound == BoundId::T1A ? check_t1a(trace, cfg.tol)
                           : cfg.bound == BoundId::T1B
                               ? check_t1b(trace, cfg.tol)
                               : check_sen(trace, cfg.tol);
      out.margin = report.margin;
      if (serialize) out.instance = chain_instance_json(chain, report);
      return out;
    }
    case BoundId::Corollary1: {
      const Index d = 2 + static_cast<Index>(rng.below(
                              static_cast<std::uint64_t>(cfg.maxDim - 1)));
      const std::size_t n =
          1 + static_cast<std::size_t>(rng.below(cfg.maxLength));
      std::vector<Projector> ps;
      ps.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Index rank = static_cast<Index>(
            rng.below(static_cast<std::uint64_t>(d + 1)));
        ps.push_back(random_projector(d, rank, rng));
      }
      const BoundReport report = check_corollary1(ps, cfg.tol);
      out.margin = report.margin;
      if (serialize) {
        Json matrices = Json::array();
        for (const Projector& p : ps) matrices.push_back(matrix_to_json(p.matrix()));
        out.instance =
            Json{{"projectors", matrices}, {"report", report_to_json(report)}};
      }
      return out;
    }
    case BoundId::Wilde4th: {
      MeasurementChain chain = zeno_chain(rng, cfg, 0.01);
      ChainTrace trace;
      try {
        trace = run_back_and_forth(chain, opts);
      } catch (const VanishingBranchError&) {
        return out;
      }
      const BoundReport report = check_wilde4th(trace, cfg.tol);
      out.margin = report.margin;
      if (serialize) out.instance = chain_instance_json(chain, report);
      return out;
    }
    case BoundId::Lemma1Step:
    case BoundId::Lemma2Step: {
      const bool zeno =
          cfg.bound == BoundId::Lemma2Step && rng.uniform() < 0.5;
      MeasurementChain chain = zeno
                                   ? zeno_chain(rng, cfg, 0.45)
                                   : random_chain(rng, cfg, false, 0.0);
      ChainTrace trace;
      try {
        trace = run_chain(chain, opts);
      } catch (const VanishingBranchError&) {
        return out;
      }
      const std::vector<BoundReport> reports =
          cfg.bound == BoundId::Lemma1Step ? check_lemma1(trace, cfg.tol)
                                           : check_lemma2(trace, cfg.tol);
      const BoundReport* worst = nullptr;
      const double margin = worst_margin(reports, &worst);
      if (worst == nullptr) {
        return out;  // skipped by precondition, or a single-step chain
      }
      out.margin = margin;
      if (serialize) out.instance = chain_instance_json(chain, *worst);
      return out;
    }
    case BoundId::AppendixBW: {
      const std::size_t n = 1 + static_cast<std::size_t>(rng.below(8));
      std::vector<double> weights(n);
      double totalWeight = 0.0;
      for (double& w : weights) {
        w = rng.uniform() + 1e-12;
        totalWeight += w;
      }
      const double target = 0.5 * rng.uniform();
      std::vector<double> alphas(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double s = weights[i] / totalWeight * target;
        alphas[i] = std::asin(std::sqrt(std::min(1.0, s)));
      }
      const BoundReport report = check_appendixB_W(alphas, cfg.tol);
      if (report.skipped) return out;
      out.margin = report.margin;
      if (serialize) {
        out.instance =
            Json{{"alphas", alphas}, {"report", report_to_json(report)}};
      }
      return out;
    }
    case BoundId::HayashiNagaoka: {
      const Index d = 2 + static_cast<Index>(rng.below(
                              static_cast<std::uint64_t>(cfg.maxDim - 1)));
      Effect s = random_effect(d, rng);
      const Index rank = 1 + static_cast<Index>(
                                 rng.below(static_cast<std::uint64_t>(d)));
      const double scale = 3.0 * rng.uniform();
      ComplexMatrix t = scale * random_density(d, rank, rng).matrix();
      if (rng.uniform() < 0.3 && d > 2) {
        // Shared kernel: exercises the pseudo-inverse on a strict support.
        const Index subRank = 1 + static_cast<Index>(rng.below(
                                      static_cast<std::uint64_t>(d - 1)));
        const Projector sub = random_projector(d, subRank, rng);
        s = Effect(sub.matrix() * s.matrix() * sub.matrix(), cfg.tol);
        t = sub.matrix() * t * sub.matrix();
        t = 0.5 * (t + t.adjoint().eval());
      }
      const BoundReport report = check_hayashi_nagaoka(s, t, cfg.tol);
      out.margin = report.margin;
      if (serialize) {
        out.instance = Json{{"s", matrix_to_json(s.matrix())},
                            {"t", matrix_to_json(t)},
                            {"report", report_to_json(report)}};
      }
      return out;
    }
    case BoundId::PovmRepeat: {
      const Index d = 2 + static_cast<Index>(rng.below(
                              static_cast<std::uint64_t>(cfg.maxDim - 1)));
      const Effect e = random_effect(d, rng);
      const Index rank = 1 + static_cast<Index>(
                                 rng.below(static_cast<std::uint64_t>(d)));
      const DensityOperator rho = random_density(d, rank, rng);
      const std::size_t m = 1 + static_cast<std::size_t>(rng.below(10));
      const BoundReport report = check_povm_repeat(e, rho, m, cfg.tol);
      out.margin = report.margin;
      if (serialize) {
        out.instance = Json{{"effect", matrix_to_json(e.matrix())},
                            {"rho", matrix_to_json(rho.matrix())},
                            {"m", m},
                            {"report", report_to_json(report)}};
      }
      return out;
    }
  }
  return out;
}

}  // namespace

HuntConfig HuntConfig::defaults_for(BoundId bound) {
  HuntConfig cfg;
  cfg.bound = bound;
  cfg.trials = bound == BoundId::AppendixBW ? 100000 : 10000;
  if (bound == BoundId::Corollary1) cfg.maxLength = 6;
  return cfg;
}

HuntSummary hunt_violations(const HuntConfig& config) {
  if (config.trials == 0) {
    throw ValidationError("hunt_violations: need at least one trial");
  }
  std::vector<double> margins(config.trials, kNaN);

  unsigned workers = config.threads == 0
                         ? std::max(1u, std::thread::hardware_concurrency())
                         : config.threads;
  workers = static_cast<unsigned>(
      std::min<std::size_t>(workers, config.trials));

  std::exception_ptr firstError;
  std::mutex errorLock;
  auto runRange = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t t = lo; t < hi; ++t) {
      try {
        margins[t] = run_trial(config, t, false).margin;
      } catch (...) {
        std::lock_guard<std::mutex> guard(errorLock);
        if (!firstError) firstError = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    runRange(0, config.trials);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (config.trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(config.trials, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(runRange, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  if (firstError) std::rethrow_exception(firstError);

  HuntSummary summary;
  summary.bound = config.bound;
  summary.trials = config.trials;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool haveMin = false;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const double m = margins[t];
    if (std::isnan(m)) {
      ++summary.skipped;
      continue;
    }
    ++summary.evaluated;
    if (m < -config.tol.violation) ++summary.violations;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
    if (!haveMin || m < summary.minMargin) {
      summary.minMargin = m;
      summary.argminTrial = t;
      haveMin = true;
    }
  }
  summary.violationFound = summary.violations > 0;

  if (summary.evaluated == 0) {
    summary.minMargin = 0.0;
    summary.argminInstance = Json{{"note", "all trials skipped"}};
    summary.histogramLow = 0.0;
    summary.histogramHigh = 0.0;
    summary.histogram.assign(config.histogramBins, 0);
    return summary;
  }

  if (!(hi > lo)) hi = lo + 1e-12;
  summary.histogramLow = lo;
  summary.histogramHigh = hi;
  summary.histogram.assign(config.histogramBins, 0);
  const double width = hi - lo;
  for (std::size_t t = 0; t < config.trials; ++t) {
    const double m = margins[t];
    if (std::isnan(m)) continue;
    auto bin = static_cast<std::size_t>((m - lo) / width *
                                        static_cast<double>(config.histogramBins));
    bin = std::min(bin, config.histogramBins - 1);
    ++summary.histogram[bin];
  }

  summary.argminInstance = run_trial(config, summary.argminTrial, true).instance;
  return summary;
}

Json hunt_summary_to_json(const HuntSummary& summary) {
  return Json{{"bound", std::string(to_string(summary.bound))},
              {"trials", summary.trials},
              {"evaluated", summary.evaluated},
              {"skipped", summary.skipped},
              {"violations", summary.violations},
              {"violationFound", summary.violationFound},
              {"minMargin", summary.minMargin},
              {"argminTrial", summary.argminTrial},
              {"argminInstance", summary.argminInstance},
              {"histogramLow", summary.histogramLow},
              {"histogramHigh", summary.histogramHigh},
              {"histogram", summary.histogram}};
}

double sen_t1b_crossover(std::size_t gridSize) {
  if (gridSize < 8) {
    throw ValidationError("sen_t1b_crossover: grid too coarse");
  }
  const auto gap = [](double x) {
    return (1.0 - 4.0 * x) - (1.0 - 2.0 * std::sqrt(x));
  };
  double lo = 0.0, hi = 0.0;
  for (std::size_t j = 1; j <= gridSize; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(gridSize);
    if (gap(x) <= 0.0) {
      hi = x;
      lo = static_cast<double>(j - 1) / static_cast<double>(gridSize);
      break;
    }
  }
  if (hi == 0.0) return 1.0;
  if (lo == 0.0) lo = hi * 0.5;  // gap(0) = 0 is the trivial root
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gap(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace qub
