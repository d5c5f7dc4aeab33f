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

#ifndef QUB_SEQDECODE_HPP
#define QUB_SEQDECODE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "qub/qstate.hpp"

namespace qub {

/// Classical-quantum channel: input letter j is carried to the output state
/// sigma_j; letters are drawn with the given prior.
struct CqChannel {
  CqChannel(std::vector<double> prior, std::vector<DensityOperator> outputs,
            const Tolerances& tol = default_tolerances());

  std::vector<double> prior;
  std::vector<DensityOperator> outputs;

  std::size_t alphabet_size() const { return outputs.size(); }
  Index dim() const { return outputs.front().dim(); }

  /// Prior-averaged output state sum_j p_j sigma_j.
  DensityOperator average() const;
};

/// chi = S(sum_j p_j sigma_j) - sum_j p_j S(sigma_j), in bits.
double holevo_quantity(const CqChannel& ch,
                       const Tolerances& tol = default_tolerances());

struct Codebook {
  std::size_t blockLength = 0;
  double rate = 0.0;
  /// 2^ceil(blockLength * rate) codewords over the channel alphabet.
  std::vector<std::vector<std::size_t>> entries;

  std::size_t size() const { return entries.size(); }
};

/// Codebook of 2^ceil(nR) entries with symbols drawn i.i.d. from the prior.
Codebook random_codebook(const CqChannel& ch, std::size_t blockLength,
                         double rate, RngStream& rng,
                         const ResourceLimits& limits = default_limits());

struct TypicalSpec {
  std::size_t blockLength = 1;
  double delta = 0.1;
};

/// Typical subspace of a tensor power, kept in factored form: the isometry
/// columns are the retained product eigenvectors and eigenvalues[c] is the
/// product eigenvalue attached to column c. Rank zero (empty window) is a
/// legal value with a 0-column isometry.
struct TypicalSubspace {
  ComplexMatrix isometry;
  std::vector<double> eigenvalues;

  Index dim() const { return isometry.rows(); }
  Index rank() const { return isometry.cols(); }
  Projector projector() const { return Projector::from_isometry(isometry); }
};

/// Subspace of sigma^{(x) n} spanned by product eigenvectors whose eigenvalue
/// sequences satisfy |-(1/n) sum_k log2 lambda_{x_k} - S(sigma)| <= delta.
/// Zero eigenvalues are never typical (their surprisal is infinite).
TypicalSubspace typical_subspace(const DensityOperator& sigma,
                                 const TypicalSpec& spec,
                                 const ResourceLimits& limits = default_limits(),
                                 const Tolerances& tol = default_tolerances());

/// Same window around the codeword's empirical entropy
/// (1/n) sum_k S(sigma_{c_k}), taken over products of per-position
/// eigenvalues.
TypicalSubspace conditional_typical_subspace(
    const CqChannel& ch, const std::vector<std::size_t>& codeword,
    const TypicalSpec& spec, const ResourceLimits& limits = default_limits(),
    const Tolerances& tol = default_tolerances());

/// Dense projector forms of the subspaces above.
Projector typical_projector(const DensityOperator& sigma,
                            const TypicalSpec& spec,
                            const ResourceLimits& limits = default_limits(),
                            const Tolerances& tol = default_tolerances());
Projector conditional_typical_projector(
    const CqChannel& ch, const std::vector<std::size_t>& codeword,
    const TypicalSpec& spec, const ResourceLimits& limits = default_limits(),
    const Tolerances& tol = default_tolerances());

/// Measured account of the four typicality properties at finite block length.
struct TypicalityAudit {
  std::size_t blockLength = 0;
  double delta = 0.0;

  /// tr(P sigma^{(x) n}).
  double globalKeep = 0.0;
  /// min over codebook entries of tr(P_c sigma_c).
  double minConditionalKeep = 0.0;
  /// Smallest epsilon for which the first two properties hold:
  /// max(1 - globalKeep, 1 - minConditionalKeep).
  double epsilon = 0.0;

  std::size_t globalRank = 0;
  double globalRankBound = 0.0;  // 2^{n(S(sigma) + delta)}
  bool globalRankWithinBound = false;
  /// Conditional rank vs both exponents: the codeword-empirical entropy bound
  /// (true by construction) and the prior-averaged exponent the error
  /// analysis uses in expectation.
  bool conditionalRankWithinEmpiricalBound = false;
  bool conditionalRankWithinAveragedBound = false;
  double averagedRankBound = 0.0;  // 2^{n(sum_j p_j S(sigma_j) + delta)}

  /// Extremes over the retained product eigenvalues of P sigma^{(x)n} P.
  double maxRetainedEigenvalue = 0.0;
  double eigenvalueCeiling = 0.0;  // 2^{-n(S(sigma) - delta)}
  bool eigenvaluesWithinCeiling = false;
  double minRetainedEigenvalue = 0.0;
  double eigenvalueFloor = 0.0;  // 2^{-n(S(sigma) + delta)}
  bool eigenvaluesAboveFloor = false;
};

TypicalityAudit typicality_audit(const CqChannel& ch, const TypicalSpec& spec,
                                 const Codebook& codebook,
                                 const ResourceLimits& limits = default_limits(),
                                 const Tolerances& tol = default_tolerances());

enum class DecodeMode { Exact, Sampled };

struct DecodeOutcome {
  /// Index the decoder declared, or none if every test answered no.
  std::optional<std::size_t> detected;
  bool success = false;
  /// Exact probability of the correct-detection record
  /// tr(P_{c_m} Pbar_{c_{m-1}} ... Pbar_{c_1} P sigma_m P ... P_{c_m});
  /// populated in exact mode.
  std::optional<double> exactSuccessProbability;
  /// The same probability accumulated as a product of step conditionals;
  /// agreement with the operator form is a consistency witness.
  std::optional<double> stepwiseSuccessProbability;
  /// Instance-wise lower bound on the success probability:
  /// tr(P sigma_m) - 4 tr(Pbar_{c_m} P sigma_m P)
  ///   - 4 sum_{i<m} tr(P_{c_i} P sigma_m P).
  double lowerBound = 0.0;
};

/// Runs the sequential decoder for transmitted index m: global typicality
/// test first, then "is it codeword i?" in order. Sampled mode draws each
/// binary outcome with its conditional probability (a vanishing branch is
/// treated as a deterministic "no"); exact mode additionally evaluates the
/// success probability of the correct record.
DecodeOutcome sequential_decode(const CqChannel& ch, const Codebook& codebook,
                                std::size_t transmitted,
                                const TypicalSpec& spec, DecodeMode mode,
                                RngStream& rng,
                                const ResourceLimits& limits = default_limits(),
                                const Tolerances& tol = default_tolerances());

struct PgmOutcome {
  /// tr(Lambda_m sigma_m) for the pretty-good-measurement element
  /// Lambda_m = X^{-1/2} P P_{c_m} P X^{-1/2}, X = sum_i P P_{c_i} P
  /// (pseudo-inverse square root on the support of X).
  double successProbability = 0.0;
  /// Min eigenvalue of Lambda_m - [P - 2 P Pbar_{c_m} P - 4 sum_{i!=m}
  /// P P_{c_i} P], restricted to the range of P (the difference vanishes
  /// elsewhere).
  double operatorMargin = 0.0;
};

PgmOutcome pgm_decode(const CqChannel& ch, const Codebook& codebook,
                      std::size_t transmitted, const TypicalSpec& spec,
                      const ResourceLimits& limits = default_limits(),
                      const Tolerances& tol = default_tolerances());

/// Min eigenvalue of Lambda_m^s - [P - 4 P Pbar_{c_m} P - 4 sum_{i<m}
/// P P_{c_i} P] on the range of P, where Lambda_m^s is the sequential-decoder
/// success operator.
double sequential_operator_margin(const CqChannel& ch, const Codebook& codebook,
                                  std::size_t transmitted,
                                  const TypicalSpec& spec,
                                  const ResourceLimits& limits = default_limits(),
                                  const Tolerances& tol = default_tolerances());

struct DecodeTrialRecord {
  std::size_t trial = 0;
  std::size_t transmitted = 0;
  bool success = false;
  double pcExact = 0.0;        // NaN in sampled mode
  double corollary1Rhs = 0.0;  // instance-wise lower bound
  double epsilon = 0.0;        // measured typicality epsilon of this codebook
  double paperRhs = 0.0;       // 33 eps + 4 * 2^{n(R - (chi - 2 delta))}
  double senRhs = 0.0;         // 2 sqrt(4 * 2^{n(R - (chi - 2 delta))} + 13 sqrt(eps))
};

struct DecodeStats {
  std::size_t trials = 0;
  std::size_t successes = 0;
  double empiricalErrorRate = 0.0;
  /// Corollary-1 instance-wise lower bound per trial.
  std::vector<double> perTrialBoundRHS;
  double holevo = 0.0;
  /// Paper error bound evaluated at the largest measured epsilon.
  double boundRHS_paper = 0.0;
  double boundRHS_sen = 0.0;
  double epsilonMax = 0.0;
  /// Monte Carlo standard error sqrt(p(1-p)/trials) of the error rate.
  double standardError = 0.0;
  /// Fraction of trials where |p_c - lower bound| <= 0.01 (exact mode only).
  double tightFraction = 0.0;
  std::vector<DecodeTrialRecord> records;
};

struct ExperimentConfig {
  std::size_t blockLength = 8;
  double rate = 0.3;
  double delta = 0.1;
  std::size_t trials = 500;
  DecodeMode mode = DecodeMode::Exact;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
  ResourceLimits limits = default_limits();
  Tolerances tol = default_tolerances();
};

/// Monte Carlo estimate of the decoder's behavior: each trial draws a fresh
/// codebook and transmitted index from (seed, trial), simulates the decoder,
/// and in exact mode also evaluates the success probability and its
/// instance-wise lower bound. Deterministic for fixed seed regardless of the
/// worker count.
DecodeStats decoding_experiment(const CqChannel& ch,
                                const ExperimentConfig& config);

}  // namespace qub

#endif
