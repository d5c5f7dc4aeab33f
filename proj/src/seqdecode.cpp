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

#include "qub/seqdecode.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>
#include <thread>
#include <utility>

namespace qub {

namespace {

constexpr double kZeroEig = 0.0;  // eigenvalues <= this carry infinite surprisal

struct SymbolBasis {
  RealVector values;  // ascending, clipped at zero
  ComplexMatrix vectors;
  double entropy = 0.0;
};

double entropy_from_values(const RealVector& values) {
  double s = 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    if (values[i] > 0.0) s -= values[i] * std::log2(values[i]);
  }
  return std::max(0.0, s);
}

SymbolBasis decompose(const DensityOperator& sigma, const Tolerances& tol) {
  EigenDecomposition eig = hermitian_eig(sigma.matrix(), tol);
  SymbolBasis basis;
  basis.values = eig.eigenvalues.cwiseMax(0.0);
  basis.vectors = std::move(eig.eigenvectors);
  basis.entropy = entropy_from_values(basis.values);
  return basis;
}

Index power_dim(Index d, std::size_t n, const ResourceLimits& limits) {
  Index total = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (static_cast<std::size_t>(total) > limits.maxDim / static_cast<std::size_t>(d)) {
      throw ResourceError("block dimension " + std::to_string(d) + "^" +
                          std::to_string(n) + " exceeds cap " +
                          std::to_string(limits.maxDim));
    }
    total *= d;
  }
  return total;
}

/// Visits every symbol sequence in lexicographic order (first position most
/// significant), which matches the linear index order of tensor products.
template <class F>
void for_each_sequence(Index d, std::size_t n, F&& visit) {
  std::vector<Index> x(n, 0);
  Index linear = 0;
  while (true) {
    visit(static_cast<const std::vector<Index>&>(x), linear);
    ++linear;
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++x[k] < d) break;
      x[k] = 0;
      if (k == 0) return;
    }
  }
}

/// Index data of a typical subspace: which product sequences are retained,
/// with their product eigenvalues. No dense objects.
struct ProductSelection {
  std::size_t blockLength = 0;
  Index symbolDim = 0;
  double centerEntropy = 0.0;
  double delta = 0.0;
  std::vector<std::vector<Index>> sequences;
  std::vector<double> products;

  double keep() const {
    return std::accumulate(products.begin(), products.end(), 0.0);
  }
};

ProductSelection select_typical(const std::vector<const SymbolBasis*>& perPos,
                                double delta, const ResourceLimits& limits) {
  const std::size_t n = perPos.size();
  const Index d = perPos.front()->values.size();
  power_dim(d, n, limits);

  double center = 0.0;
  for (const SymbolBasis* b : perPos) center += b->entropy;
  center /= static_cast<double>(n);

  // Surprisal table: -log2 lambda per position and local index; NaN marks a
  // zero eigenvalue (never typical).
  std::vector<RealVector> logTable(n);
  for (std::size_t k = 0; k < n; ++k) {
    logTable[k] = RealVector(d);
    for (Index i = 0; i < d; ++i) {
      const double lambda = perPos[k]->values[i];
      logTable[k][i] = lambda > kZeroEig
                           ? -std::log2(lambda)
                           : std::numeric_limits<double>::quiet_NaN();
    }
  }

  ProductSelection sel;
  sel.blockLength = n;
  sel.symbolDim = d;
  sel.centerEntropy = center;
  sel.delta = delta;
  for_each_sequence(d, n, [&](const std::vector<Index>& x, Index) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = logTable[k][x[k]];
      if (std::isnan(s)) return;
      sum += s;
    }
    if (std::abs(sum / static_cast<double>(n) - center) <= delta) {
      sel.sequences.push_back(x);
      double prod = 1.0;
      for (std::size_t k = 0; k < n; ++k) prod *= perPos[k]->values[x[k]];
      sel.products.push_back(prod);
    }
  });
  return sel;
}

ComplexVector product_column(const std::vector<const SymbolBasis*>& perPos,
                             const std::vector<Index>& x) {
  ComplexVector col = ComplexVector::Ones(1);
  for (std::size_t k = 0; k < perPos.size(); ++k) {
    const auto v = perPos[k]->vectors.col(x[k]);
    ComplexVector next(col.size() * v.size());
    for (Index i = 0; i < col.size(); ++i)
      for (Index j = 0; j < v.size(); ++j) next[i * v.size() + j] = col[i] * v[j];
    col = std::move(next);
  }
  return col;
}

void check_dense_cells(std::size_t rows, std::size_t cols,
                       const ResourceLimits& limits, const char* what) {
  const std::size_t cap = limits.maxDenseDim * limits.maxDenseDim;
  if (cols != 0 && rows > cap / std::max<std::size_t>(cols, 1)) {
    throw ResourceError(std::string(what) + ": " + std::to_string(rows) + "x" +
                        std::to_string(cols) +
                        " dense block exceeds the dense-size cap");
  }
}

ComplexMatrix build_isometry(const std::vector<const SymbolBasis*>& perPos,
                             const ProductSelection& sel,
                             const ResourceLimits& limits) {
  const Index dim = power_dim(sel.symbolDim, sel.blockLength, limits);
  check_dense_cells(static_cast<std::size_t>(dim), sel.sequences.size(), limits,
                    "typical subspace");
  ComplexMatrix iso(dim, static_cast<Index>(sel.sequences.size()));
  for (std::size_t c = 0; c < sel.sequences.size(); ++c) {
    iso.col(static_cast<Index>(c)) = product_column(perPos, sel.sequences[c]);
  }
  return iso;
}

/// Factor F with sigma = F F^dagger for a product state, dropping zero
/// eigenvalues; for pure symbols this collapses to one column.
ComplexMatrix product_factor(const std::vector<const SymbolBasis*>& perPos,
                             const ResourceLimits& limits) {
  ComplexMatrix f = ComplexMatrix::Ones(1, 1);
  for (const SymbolBasis* b : perPos) {
    Index keep = 0;
    for (Index i = 0; i < b->values.size(); ++i)
      if (b->values[i] > kZeroEig) ++keep;
    ComplexMatrix local(b->vectors.rows(), keep);
    Index c = 0;
    for (Index i = 0; i < b->values.size(); ++i) {
      if (b->values[i] > kZeroEig) {
        local.col(c++) = b->vectors.col(i) * std::sqrt(b->values[i]);
      }
    }
    check_dense_cells(static_cast<std::size_t>(f.rows() * local.rows()),
                      static_cast<std::size_t>(f.cols() * local.cols()), limits,
                      "channel output factor");
    ComplexMatrix next(f.rows() * local.rows(), f.cols() * local.cols());
    for (Index i = 0; i < f.rows(); ++i)
      for (Index j = 0; j < f.cols(); ++j)
        next.block(i * local.rows(), j * local.cols(), local.rows(),
                   local.cols()) = f(i, j) * local;
    f = std::move(next);
  }
  return f;
}

/// Common eigenbasis data for channels whose outputs all commute; classical
/// work then happens on diagonals of length d^n instead of dense operators.
struct CommutingView {
  bool valid = false;
  ComplexMatrix basis;
  std::vector<RealVector> diagonals;  // per symbol
  std::vector<double> entropies;
  RealVector averageDiagonal;
  double averageEntropy = 0.0;
};

CommutingView try_commuting(const CqChannel& ch, const Tolerances& tol) {
  CommutingView view;
  const std::size_t J = ch.alphabet_size();
  for (std::size_t i = 0; i < J; ++i) {
    for (std::size_t j = i + 1; j < J; ++j) {
      const ComplexMatrix& a = ch.outputs[i].matrix();
      const ComplexMatrix& b = ch.outputs[j].matrix();
      if (max_abs(a * b - b * a) > 1e-12) return view;
    }
  }
  // Weighted mix with spread weights; a shared eigenbasis of the mix is a
  // candidate common basis, verified below.
  ComplexMatrix mix = ComplexMatrix::Zero(ch.dim(), ch.dim());
  for (std::size_t j = 0; j < J; ++j) {
    mix += ch.outputs[j].matrix() / (static_cast<double>(j) + std::numbers::sqrt2);
  }
  const EigenDecomposition eig = hermitian_eig(mix, tol);
  std::vector<RealVector> diagonals(J);
  for (std::size_t j = 0; j < J; ++j) {
    const ComplexMatrix rotated =
        eig.eigenvectors.adjoint() * ch.outputs[j].matrix() * eig.eigenvectors;
    ComplexMatrix off = rotated;
    off.diagonal().setZero();
    if (max_abs(off) > 1e-10) return view;
    diagonals[j] = rotated.diagonal().real().cwiseMax(0.0);
  }
  view.valid = true;
  view.basis = eig.eigenvectors;
  view.diagonals = std::move(diagonals);
  view.entropies.resize(J);
  view.averageDiagonal = RealVector::Zero(ch.dim());
  for (std::size_t j = 0; j < J; ++j) {
    view.entropies[j] = entropy_from_values(view.diagonals[j]);
    view.averageDiagonal += ch.prior[j] * view.diagonals[j];
  }
  view.averageEntropy = entropy_from_values(view.averageDiagonal);
  return view;
}

/// Typical indicator over the d^n common-basis indices, classical case.
std::vector<unsigned char> classical_indicator(const RealVector& diag,
                                               double center, std::size_t n,
                                               double delta, Index blockDim) {
  const Index d = diag.size();
  RealVector logs(d);
  for (Index i = 0; i < d; ++i) {
    logs[i] = diag[i] > kZeroEig ? -std::log2(diag[i])
                                 : std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<unsigned char> ind(static_cast<std::size_t>(blockDim), 0);
  for_each_sequence(d, n, [&](const std::vector<Index>& x, Index linear) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = logs[x[k]];
      if (std::isnan(s)) return;
      sum += s;
    }
    if (std::abs(sum / static_cast<double>(n) - center) <= delta)
      ind[static_cast<std::size_t>(linear)] = 1;
  });
  return ind;
}

std::vector<unsigned char> classical_conditional_indicator(
    const CommutingView& view, const std::vector<std::size_t>& word,
    double delta, Index blockDim) {
  const std::size_t n = word.size();
  const Index d = view.averageDiagonal.size();
  double center = 0.0;
  for (std::size_t sym : word) center += view.entropies[sym];
  center /= static_cast<double>(n);
  std::vector<unsigned char> ind(static_cast<std::size_t>(blockDim), 0);
  for_each_sequence(d, n, [&](const std::vector<Index>& x, Index linear) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double lambda = view.diagonals[word[k]][x[k]];
      if (lambda <= kZeroEig) return;
      sum -= std::log2(lambda);
    }
    if (std::abs(sum / static_cast<double>(n) - center) <= delta)
      ind[static_cast<std::size_t>(linear)] = 1;
  });
  return ind;
}

RealVector classical_state(const CommutingView& view,
                           const std::vector<std::size_t>& word,
                           Index blockDim) {
  const std::size_t n = word.size();
  const Index d = view.averageDiagonal.size();
  RealVector q(blockDim);
  for_each_sequence(d, n, [&](const std::vector<Index>& x, Index linear) {
    double prod = 1.0;
    for (std::size_t k = 0; k < n; ++k) prod *= view.diagonals[word[k]][x[k]];
    q[linear] = prod;
  });
  return q;
}

/// Draws a binary outcome whose yes-probability is p; vanishing branches are
/// taken deterministically instead of renormalizing on (numerical) zero.
bool draw_outcome(double p, RngStream& rng, double floor) {
  p = std::clamp(p, 0.0, 1.0);
  if (p <= floor) return false;
  if (1.0 - p <= floor) return true;
  return rng.uniform() < p;
}

// ---------------------------------------------------------------------------
// Shared decode context: everything that depends on (channel, spec) only.

struct DecodeContext {
  const CqChannel* channel = nullptr;
  TypicalSpec spec;
  ResourceLimits limits;
  Tolerances tol;
  Index blockDim = 0;

  CommutingView commuting;

  // Dense-path pieces (empty when the commuting path is active).
  std::vector<SymbolBasis> symbolBases;
  SymbolBasis averageBasis;
  ProductSelection globalSel;
  ComplexMatrix globalIso;

  // Commuting-path pieces.
  std::vector<unsigned char> globalInd;
  double globalKeepValue = 0.0;

  double global_keep() const { return globalKeepValue; }
};

DecodeContext make_context(const CqChannel& ch, const TypicalSpec& spec,
                           const ResourceLimits& limits, const Tolerances& tol,
                           bool needDense) {
  DecodeContext ctx;
  ctx.channel = &ch;
  ctx.spec = spec;
  ctx.limits = limits;
  ctx.tol = tol;
  ctx.blockDim = power_dim(ch.dim(), spec.blockLength, limits);

  ctx.commuting = try_commuting(ch, tol);
  if (ctx.commuting.valid && !needDense) {
    ctx.globalInd = classical_indicator(ctx.commuting.averageDiagonal,
                                        ctx.commuting.averageEntropy,
                                        spec.blockLength, spec.delta,
                                        ctx.blockDim);
    // tr(P avg^n) as a classical sum over typical indices.
    double keep = 0.0;
    const Index d = ch.dim();
    for_each_sequence(d, spec.blockLength,
                      [&](const std::vector<Index>& x, Index linear) {
                        if (!ctx.globalInd[linear]) return;
                        double prod = 1.0;
                        for (std::size_t k = 0; k < spec.blockLength; ++k)
                          prod *= ctx.commuting.averageDiagonal[x[k]];
                        keep += prod;
                      });
    ctx.globalKeepValue = keep;
    return ctx;
  }

  ctx.commuting.valid = false;
  ctx.symbolBases.reserve(ch.alphabet_size());
  for (const DensityOperator& out : ch.outputs) {
    ctx.symbolBases.push_back(decompose(out, tol));
  }
  ctx.averageBasis = decompose(ch.average(), tol);
  std::vector<const SymbolBasis*> perPos(spec.blockLength, &ctx.averageBasis);
  ctx.globalSel = select_typical(perPos, spec.delta, limits);
  ctx.globalIso = build_isometry(perPos, ctx.globalSel, limits);
  ctx.globalKeepValue = ctx.globalSel.keep();
  return ctx;
}

std::vector<const SymbolBasis*> word_bases(const DecodeContext& ctx,
                                           const std::vector<std::size_t>& w) {
  std::vector<const SymbolBasis*> perPos;
  perPos.reserve(w.size());
  for (std::size_t sym : w) perPos.push_back(&ctx.symbolBases[sym]);
  return perPos;
}

/// Per-codebook prepared data for one decode run.
struct PreparedCodebook {
  // Dense path.
  std::vector<ComplexMatrix> condIso;
  // Commuting path.
  std::vector<std::vector<unsigned char>> condInd;
  // Both paths: tr(P_{c_i} sigma_{c_i}) per entry.
  std::vector<double> condKeep;
};

PreparedCodebook prepare_codebook(const DecodeContext& ctx,
                                  const Codebook& codebook) {
  PreparedCodebook prep;
  const std::size_t M = codebook.size();
  prep.condKeep.resize(M);
  if (ctx.commuting.valid) {
    prep.condInd.resize(M);
    for (std::size_t i = 0; i < M; ++i) {
      prep.condInd[i] = classical_conditional_indicator(
          ctx.commuting, codebook.entries[i], ctx.spec.delta, ctx.blockDim);
      const RealVector q =
          classical_state(ctx.commuting, codebook.entries[i], ctx.blockDim);
      double keep = 0.0;
      for (Index b = 0; b < ctx.blockDim; ++b)
        if (prep.condInd[i][b]) keep += q[b];
      prep.condKeep[i] = keep;
    }
    return prep;
  }
  prep.condIso.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    const auto perPos = word_bases(ctx, codebook.entries[i]);
    const ProductSelection sel =
        select_typical(perPos, ctx.spec.delta, ctx.limits);
    prep.condIso[i] = build_isometry(perPos, sel, ctx.limits);
    prep.condKeep[i] = sel.keep();
  }
  return prep;
}

DecodeOutcome decode_dense(const DecodeContext& ctx, const Codebook& codebook,
                           const PreparedCodebook& prep, std::size_t m,
                           DecodeMode mode, RngStream& rng) {
  DecodeOutcome out;
  const double floor = ctx.tol.probFloor;
  const auto perPos = word_bases(ctx, codebook.entries[m]);
  const ComplexMatrix f = product_factor(perPos, ctx.limits);
  const ComplexMatrix& uG = ctx.globalIso;

  // Instance-wise lower bound from scalar traces.
  const ComplexMatrix pinched = uG * (uG.adjoint() * f).eval();
  const double t0 = (uG.adjoint() * f).squaredNorm();
  double interference = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    interference += (prep.condIso[i].adjoint() * pinched).squaredNorm();
  }
  const double sm = (prep.condIso[m].adjoint() * pinched).squaredNorm();
  out.lowerBound = 4.0 * sm - 3.0 * t0 - 4.0 * interference;

  if (mode == DecodeMode::Exact) {
    // Operator-string form.
    ComplexMatrix x = pinched;
    for (std::size_t i = 0; i < m; ++i) {
      x -= prep.condIso[i] * (prep.condIso[i].adjoint() * x).eval();
    }
    x = prep.condIso[m] * (prep.condIso[m].adjoint() * x).eval();
    out.exactSuccessProbability = x.squaredNorm();

    // Step-conditional form of the same record.
    double product = 1.0;
    ComplexMatrix g = f;
    bool dead = false;
    auto condition = [&](const ComplexMatrix& next) {
      const double p = next.squaredNorm() / g.squaredNorm();
      product *= std::clamp(p, 0.0, 1.0);
      if (p <= floor) {
        dead = true;
        return;
      }
      g = next / std::sqrt(next.squaredNorm());
    };
    g /= g.norm();
    condition(uG * (uG.adjoint() * g).eval());
    for (std::size_t i = 0; i < m && !dead; ++i) {
      condition((g - prep.condIso[i] * (prep.condIso[i].adjoint() * g).eval()).eval());
    }
    if (!dead) condition(prep.condIso[m] * (prep.condIso[m].adjoint() * g).eval());
    out.stepwiseSuccessProbability = product;
  }

  // Simulated run: global test, then candidates in order.
  ComplexMatrix g = f / f.norm();
  const double pGlobal = (uG.adjoint() * g).squaredNorm();
  if (!draw_outcome(pGlobal, rng, floor)) {
    out.detected = std::nullopt;
    out.success = false;
    return out;
  }
  g = uG * (uG.adjoint() * g).eval();
  g /= g.norm();
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    const double pYes = (prep.condIso[i].adjoint() * g).squaredNorm();
    if (draw_outcome(pYes, rng, floor)) {
      out.detected = i;
      out.success = (i == m);
      return out;
    }
    ComplexMatrix no = g - prep.condIso[i] * (prep.condIso[i].adjoint() * g).eval();
    const double pn = no.squaredNorm();
    if (pn <= floor) {
      out.detected = std::nullopt;
      out.success = false;
      return out;
    }
    g = no / std::sqrt(pn);
  }
  out.detected = std::nullopt;
  out.success = false;
  return out;
}

DecodeOutcome decode_classical(const DecodeContext& ctx,
                               const Codebook& codebook,
                               const PreparedCodebook& prep, std::size_t m,
                               DecodeMode mode, RngStream& rng) {
  DecodeOutcome out;
  const double floor = ctx.tol.probFloor;
  const RealVector q0 =
      classical_state(ctx.commuting, codebook.entries[m], ctx.blockDim);
  const auto& indP = ctx.globalInd;

  double t0 = 0.0, sm = 0.0, interference = 0.0;
  for (Index b = 0; b < ctx.blockDim; ++b) {
    if (!indP[b]) continue;
    t0 += q0[b];
    if (prep.condInd[m][b]) sm += q0[b];
    for (std::size_t i = 0; i < m; ++i)
      if (prep.condInd[i][b]) interference += q0[b];
  }
  out.lowerBound = 4.0 * sm - 3.0 * t0 - 4.0 * interference;

  if (mode == DecodeMode::Exact) {
    double pc = 0.0;
    for (Index b = 0; b < ctx.blockDim; ++b) {
      if (!indP[b] || !prep.condInd[m][b]) continue;
      bool excluded = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (prep.condInd[i][b]) {
          excluded = true;
          break;
        }
      }
      if (!excluded) pc += q0[b];
    }
    out.exactSuccessProbability = pc;
    out.stepwiseSuccessProbability = pc;  // projectors commute, so the
                                          // conditional product telescopes
  }

  RealVector q = q0 / q0.sum();
  auto mass = [&](const std::vector<unsigned char>& ind, bool inside) {
    double s = 0.0;
    for (Index b = 0; b < ctx.blockDim; ++b)
      if (static_cast<bool>(ind[b]) == inside) s += q[b];
    return s;
  };
  const double pGlobal = mass(indP, true);
  if (!draw_outcome(pGlobal, rng, floor)) {
    out.detected = std::nullopt;
    return out;
  }
  for (Index b = 0; b < ctx.blockDim; ++b)
    if (!indP[b]) q[b] = 0.0;
  q /= q.sum();
  for (std::size_t i = 0; i < codebook.size(); ++i) {
    const double pYes = mass(prep.condInd[i], true);
    if (draw_outcome(pYes, rng, floor)) {
      out.detected = i;
      out.success = (i == m);
      return out;
    }
    const double pNo = 1.0 - std::clamp(pYes, 0.0, 1.0);
    if (pNo <= floor) {
      out.detected = std::nullopt;
      return out;
    }
    for (Index b = 0; b < ctx.blockDim; ++b)
      if (prep.condInd[i][b]) q[b] = 0.0;
    q /= q.sum();
  }
  out.detected = std::nullopt;
  return out;
}

DecodeOutcome decode_with_context(const DecodeContext& ctx,
                                  const Codebook& codebook,
                                  const PreparedCodebook& prep, std::size_t m,
                                  DecodeMode mode, RngStream& rng) {
  if (ctx.commuting.valid) {
    return decode_classical(ctx, codebook, prep, m, mode, rng);
  }
  return decode_dense(ctx, codebook, prep, m, mode, rng);
}

/// Pseudo-inverse square root of a Hermitian PSD matrix, zero on the
/// numerical kernel.
ComplexMatrix pinv_sqrt(const ComplexMatrix& a, const Tolerances& tol) {
  const EigenDecomposition eig = hermitian_eig(a, tol);
  const double cutoff =
      std::max(1e-12 * std::max(0.0, eig.eigenvalues.maxCoeff()), 0.0);
  RealVector mapped(eig.eigenvalues.size());
  for (Index i = 0; i < mapped.size(); ++i) {
    mapped[i] =
        eig.eigenvalues[i] > cutoff ? 1.0 / std::sqrt(eig.eigenvalues[i]) : 0.0;
  }
  return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
}

void validate_transmitted(const Codebook& codebook, std::size_t m) {
  if (m >= codebook.size()) {
    throw ValidationError("transmitted index " + std::to_string(m) +
                          " outside codebook of size " +
                          std::to_string(codebook.size()));
  }
  for (const auto& w : codebook.entries) {
    if (w.size() != codebook.blockLength) {
      throw ValidationError("codebook entry length mismatch");
    }
  }
}

}  // namespace

CqChannel::CqChannel(std::vector<double> priorIn,
                     std::vector<DensityOperator> outputsIn,
                     const Tolerances& tol)
    : prior(std::move(priorIn)), outputs(std::move(outputsIn)) {
  if (outputs.empty() || prior.size() != outputs.size()) {
    throw ValidationError(
        "CqChannel: prior and outputs must be non-empty and equally sized");
  }
  const Index d = outputs.front().dim();
  for (const DensityOperator& s : outputs) {
    if (s.dim() != d) {
      throw ShapeError("CqChannel: output dimensions differ");
    }
    if (std::abs(s.trace() - 1.0) > tol.abs) {
      throw ValidationError("CqChannel: outputs must be normalized");
    }
  }
  double sum = 0.0;
  for (double& p : prior) {
    if (p < -1e-12) {
      throw ValidationError("CqChannel: negative prior entry");
    }
    p = std::max(0.0, p);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw ValidationError("CqChannel: prior sums to " + std::to_string(sum));
  }
}

DensityOperator CqChannel::average() const {
  ComplexMatrix m = ComplexMatrix::Zero(dim(), dim());
  for (std::size_t j = 0; j < outputs.size(); ++j) {
    m += prior[j] * outputs[j].matrix();
  }
  m = 0.5 * (m + m.adjoint().eval());
  return DensityOperator::unchecked(std::move(m));
}

double holevo_quantity(const CqChannel& ch, const Tolerances& tol) {
  double chi = von_neumann_entropy(ch.average(), tol);
  for (std::size_t j = 0; j < ch.alphabet_size(); ++j) {
    chi -= ch.prior[j] * von_neumann_entropy(ch.outputs[j], tol);
  }
  return std::max(0.0, chi);
}

Codebook random_codebook(const CqChannel& ch, std::size_t blockLength,
                         double rate, RngStream& rng,
                         const ResourceLimits& limits) {
  if (blockLength == 0) {
    throw ValidationError("random_codebook: block length must be positive");
  }
  if (rate < 0.0) {
    throw ValidationError("random_codebook: rate must be non-negative");
  }
  const double bits = std::ceil(static_cast<double>(blockLength) * rate - 1e-9);
  if (bits >= 63.0) {
    throw ResourceError("random_codebook: 2^" + std::to_string(bits) +
                        " entries overflow");
  }
  const std::size_t entries = std::size_t{1}
                              << static_cast<unsigned>(std::max(0.0, bits));
  if (entries > limits.maxCodebookEntries) {
    throw ResourceError("random_codebook: " + std::to_string(entries) +
                        " entries exceed cap " +
                        std::to_string(limits.maxCodebookEntries));
  }
  if (entries > limits.maxCodebookCells / blockLength) {
    throw ResourceError("random_codebook: " + std::to_string(entries) + " x " +
                        std::to_string(blockLength) +
                        " symbols exceed the codebook cell cap");
  }

  std::vector<double> cumulative(ch.prior.size());
  std::partial_sum(ch.prior.begin(), ch.prior.end(), cumulative.begin());
  cumulative.back() = 1.0;

  Codebook book;
  book.blockLength = blockLength;
  book.rate = rate;
  book.entries.assign(entries, std::vector<std::size_t>(blockLength, 0));
  for (auto& word : book.entries) {
    for (std::size_t k = 0; k < blockLength; ++k) {
      const double u = rng.uniform();
      word[k] = static_cast<std::size_t>(
          std::lower_bound(cumulative.begin(), cumulative.end(), u) -
          cumulative.begin());
      if (word[k] >= ch.alphabet_size()) word[k] = ch.alphabet_size() - 1;
    }
  }
  return book;
}

TypicalSubspace typical_subspace(const DensityOperator& sigma,
                                 const TypicalSpec& spec,
                                 const ResourceLimits& limits,
                                 const Tolerances& tol) {
  if (spec.delta <= 0.0) {
    throw ValidationError("typical_subspace: delta must be positive");
  }
  const SymbolBasis basis = decompose(sigma, tol);
  std::vector<const SymbolBasis*> perPos(spec.blockLength, &basis);
  const ProductSelection sel = select_typical(perPos, spec.delta, limits);
  TypicalSubspace sub;
  sub.isometry = build_isometry(perPos, sel, limits);
  sub.eigenvalues = sel.products;
  return sub;
}

TypicalSubspace conditional_typical_subspace(
    const CqChannel& ch, const std::vector<std::size_t>& codeword,
    const TypicalSpec& spec, const ResourceLimits& limits,
    const Tolerances& tol) {
  if (spec.delta <= 0.0) {
    throw ValidationError("conditional_typical_subspace: delta must be positive");
  }
  if (codeword.size() != spec.blockLength || codeword.empty()) {
    throw ValidationError(
        "conditional_typical_subspace: codeword length must equal the block "
        "length");
  }
  std::vector<SymbolBasis> bases;
  bases.reserve(ch.alphabet_size());
  for (const DensityOperator& out : ch.outputs) bases.push_back(decompose(out, tol));
  std::vector<const SymbolBasis*> perPos;
  perPos.reserve(codeword.size());
  for (std::size_t sym : codeword) {
    if (sym >= ch.alphabet_size()) {
      throw ValidationError("conditional_typical_subspace: symbol out of range");
    }
    perPos.push_back(&bases[sym]);
  }
  const ProductSelection sel = select_typical(perPos, spec.delta, limits);
  TypicalSubspace sub;
  sub.isometry = build_isometry(perPos, sel, limits);
  sub.eigenvalues = sel.products;
  return sub;
}

Projector typical_projector(const DensityOperator& sigma,
                            const TypicalSpec& spec,
                            const ResourceLimits& limits,
                            const Tolerances& tol) {
  const TypicalSubspace sub = typical_subspace(sigma, spec, limits, tol);
  check_dense_cells(static_cast<std::size_t>(sub.dim()),
                    static_cast<std::size_t>(sub.dim()), limits,
                    "typical projector");
  return sub.projector();
}

Projector conditional_typical_projector(const CqChannel& ch,
                                        const std::vector<std::size_t>& codeword,
                                        const TypicalSpec& spec,
                                        const ResourceLimits& limits,
                                        const Tolerances& tol) {
  const TypicalSubspace sub =
      conditional_typical_subspace(ch, codeword, spec, limits, tol);
  check_dense_cells(static_cast<std::size_t>(sub.dim()),
                    static_cast<std::size_t>(sub.dim()), limits,
                    "conditional typical projector");
  return sub.projector();
}

TypicalityAudit typicality_audit(const CqChannel& ch, const TypicalSpec& spec,
                                 const Codebook& codebook,
                                 const ResourceLimits& limits,
                                 const Tolerances& tol) {
  if (codebook.blockLength != spec.blockLength) {
    throw ValidationError("typicality_audit: codebook/spec block lengths differ");
  }
  TypicalityAudit audit;
  audit.blockLength = spec.blockLength;
  audit.delta = spec.delta;
  const double n = static_cast<double>(spec.blockLength);

  const SymbolBasis avg = decompose(ch.average(), tol);
  std::vector<const SymbolBasis*> avgPos(spec.blockLength, &avg);
  const ProductSelection globalSel = select_typical(avgPos, spec.delta, limits);

  audit.globalKeep = globalSel.keep();
  audit.globalRank = globalSel.sequences.size();
  audit.globalRankBound = std::exp2(n * (avg.entropy + spec.delta));
  audit.globalRankWithinBound =
      static_cast<double>(audit.globalRank) <= audit.globalRankBound;

  audit.eigenvalueCeiling = std::exp2(-n * (avg.entropy - spec.delta));
  audit.eigenvalueFloor = std::exp2(-n * (avg.entropy + spec.delta));
  if (globalSel.products.empty()) {
    audit.maxRetainedEigenvalue = 0.0;
    audit.minRetainedEigenvalue = 0.0;
    audit.eigenvaluesWithinCeiling = true;
    audit.eigenvaluesAboveFloor = true;
  } else {
    audit.maxRetainedEigenvalue =
        *std::max_element(globalSel.products.begin(), globalSel.products.end());
    audit.minRetainedEigenvalue =
        *std::min_element(globalSel.products.begin(), globalSel.products.end());
    audit.eigenvaluesWithinCeiling =
        audit.maxRetainedEigenvalue <= audit.eigenvalueCeiling;
    audit.eigenvaluesAboveFloor =
        audit.minRetainedEigenvalue >= audit.eigenvalueFloor;
  }

  std::vector<SymbolBasis> bases;
  bases.reserve(ch.alphabet_size());
  double priorEntropy = 0.0;
  for (std::size_t j = 0; j < ch.alphabet_size(); ++j) {
    bases.push_back(decompose(ch.outputs[j], tol));
    priorEntropy += ch.prior[j] * bases.back().entropy;
  }
  audit.averagedRankBound = std::exp2(n * (priorEntropy + spec.delta));

  audit.minConditionalKeep = 1.0;
  audit.conditionalRankWithinEmpiricalBound = true;
  audit.conditionalRankWithinAveragedBound = true;
  for (const auto& word : codebook.entries) {
    std::vector<const SymbolBasis*> perPos;
    double empirical = 0.0;
    for (std::size_t sym : word) {
      perPos.push_back(&bases[sym]);
      empirical += bases[sym].entropy;
    }
    empirical /= n;
    const ProductSelection sel = select_typical(perPos, spec.delta, limits);
    audit.minConditionalKeep = std::min(audit.minConditionalKeep, sel.keep());
    const double rank = static_cast<double>(sel.sequences.size());
    if (rank > std::exp2(n * (empirical + spec.delta))) {
      audit.conditionalRankWithinEmpiricalBound = false;
    }
    if (rank > audit.averagedRankBound) {
      audit.conditionalRankWithinAveragedBound = false;
    }
  }
  if (codebook.entries.empty()) audit.minConditionalKeep = 0.0;

  audit.epsilon = std::clamp(
      std::max(1.0 - audit.globalKeep, 1.0 - audit.minConditionalKeep), 0.0,
      1.0);
  return audit;
}

DecodeOutcome sequential_decode(const CqChannel& ch, const Codebook& codebook,
                                std::size_t transmitted,
                                const TypicalSpec& spec, DecodeMode mode,
                                RngStream& rng, const ResourceLimits& limits,
                                const Tolerances& tol) {
  validate_transmitted(codebook, transmitted);
  if (codebook.blockLength != spec.blockLength) {
    throw ValidationError("sequential_decode: codebook/spec block lengths differ");
  }
  const DecodeContext ctx = make_context(ch, spec, limits, tol, false);
  const PreparedCodebook prep = prepare_codebook(ctx, codebook);
  return decode_with_context(ctx, codebook, prep, transmitted, mode, rng);
}

PgmOutcome pgm_decode(const CqChannel& ch, const Codebook& codebook,
                      std::size_t transmitted, const TypicalSpec& spec,
                      const ResourceLimits& limits, const Tolerances& tol) {
  validate_transmitted(codebook, transmitted);
  const DecodeContext ctx = make_context(ch, spec, limits, tol, true);
  const PreparedCodebook prep = prepare_codebook(ctx, codebook);
  const ComplexMatrix& uG = ctx.globalIso;
  const Index r = uG.cols();
  PgmOutcome out;
  if (r == 0) {
    return out;  // empty typical subspace: zero operator on both sides
  }
  const std::size_t M = codebook.size();
  std::vector<ComplexMatrix> b(M);
  ComplexMatrix x = ComplexMatrix::Zero(r, r);
  for (std::size_t i = 0; i < M; ++i) {
    const ComplexMatrix cross = prep.condIso[i].adjoint() * uG;
    b[i] = cross.adjoint() * cross;
    x += b[i];
  }
  const ComplexMatrix xm = pinv_sqrt(x, tol);
  const ComplexMatrix lambda = xm * b[transmitted] * xm;

  const auto perPos = word_bases(ctx, codebook.entries[transmitted]);
  const ComplexMatrix f = product_factor(perPos, ctx.limits);
  const ComplexMatrix y = uG.adjoint() * f;
  out.successProbability = (y.adjoint() * lambda * y).trace().real();

  ComplexMatrix rhs = 2.0 * b[transmitted] - ComplexMatrix::Identity(r, r);
  for (std::size_t i = 0; i < M; ++i) {
    if (i != transmitted) rhs -= 4.0 * b[i];
  }
  ComplexMatrix delta = lambda - rhs;
  delta = 0.5 * (delta + delta.adjoint().eval());
  double margin = min_hermitian_eigenvalue(delta, tol);
  if (r < ctx.blockDim) margin = std::min(margin, 0.0);
  out.operatorMargin = margin;
  return out;
}

double sequential_operator_margin(const CqChannel& ch, const Codebook& codebook,
                                  std::size_t transmitted,
                                  const TypicalSpec& spec,
                                  const ResourceLimits& limits,
                                  const Tolerances& tol) {
  validate_transmitted(codebook, transmitted);
  const DecodeContext ctx = make_context(ch, spec, limits, tol, true);
  const PreparedCodebook prep = prepare_codebook(ctx, codebook);
  const ComplexMatrix& uG = ctx.globalIso;
  const Index r = uG.cols();
  if (r == 0) return 0.0;

  ComplexMatrix t = uG;
  for (std::size_t i = 0; i < transmitted; ++i) {
    t -= prep.condIso[i] * (prep.condIso[i].adjoint() * t).eval();
  }
  t = prep.condIso[transmitted] * (prep.condIso[transmitted].adjoint() * t).eval();
  const ComplexMatrix lambdaS = t.adjoint() * t;

  const ComplexMatrix crossM = prep.condIso[transmitted].adjoint() * uG;
  ComplexMatrix rhs = 4.0 * (crossM.adjoint() * crossM) -
                      3.0 * ComplexMatrix::Identity(r, r);
  for (std::size_t i = 0; i < transmitted; ++i) {
    const ComplexMatrix cross = prep.condIso[i].adjoint() * uG;
    rhs -= 4.0 * (cross.adjoint() * cross);
  }
  ComplexMatrix delta = lambdaS - rhs;
  delta = 0.5 * (delta + delta.adjoint().eval());
  double margin = min_hermitian_eigenvalue(delta, tol);
  if (r < ctx.blockDim) margin = std::min(margin, 0.0);
  return margin;
}

DecodeStats decoding_experiment(const CqChannel& ch,
                                const ExperimentConfig& config) {
  if (config.trials == 0) {
    throw ValidationError("decoding_experiment: need at least one trial");
  }
  const TypicalSpec spec{config.blockLength, config.delta};
  const DecodeContext ctx =
      make_context(ch, spec, config.limits, config.tol, false);
  const double chi = holevo_quantity(ch, config.tol);
  const double n = static_cast<double>(config.blockLength);
  const double crowd =
      4.0 * std::exp2(n * (config.rate - (chi - 2.0 * config.delta)));
  const double globalDeficit = std::clamp(1.0 - ctx.global_keep(), 0.0, 1.0);

  DecodeStats stats;
  stats.trials = config.trials;
  stats.holevo = chi;
  stats.records.resize(config.trials);

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
        RngStream rng(config.seed, t);
        Codebook book = random_codebook(ch, config.blockLength, config.rate,
                                        rng, config.limits);
        const std::size_t m =
            static_cast<std::size_t>(rng.below(book.size()));
        const PreparedCodebook prep = prepare_codebook(ctx, book);
        DecodeOutcome outcome =
            decode_with_context(ctx, book, prep, m, config.mode, rng);

        double condDeficit = 0.0;
        for (double keep : prep.condKeep) {
          condDeficit = std::max(condDeficit, 1.0 - keep);
        }
        DecodeTrialRecord rec;
        rec.trial = t;
        rec.transmitted = m;
        rec.success = outcome.success;
        rec.pcExact = outcome.exactSuccessProbability
                          ? *outcome.exactSuccessProbability
                          : std::numeric_limits<double>::quiet_NaN();
        rec.corollary1Rhs = outcome.lowerBound;
        rec.epsilon = std::clamp(std::max(globalDeficit, condDeficit), 0.0, 1.0);
        rec.paperRhs = 33.0 * rec.epsilon + crowd;
        rec.senRhs = 2.0 * std::sqrt(crowd + 13.0 * std::sqrt(rec.epsilon));
        stats.records[t] = rec;
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

  std::size_t tight = 0;
  for (const DecodeTrialRecord& rec : stats.records) {
    if (rec.success) ++stats.successes;
    stats.perTrialBoundRHS.push_back(rec.corollary1Rhs);
    stats.epsilonMax = std::max(stats.epsilonMax, rec.epsilon);
    if (config.mode == DecodeMode::Exact &&
        std::abs(rec.pcExact - rec.corollary1Rhs) <= 0.01) {
      ++tight;
    }
  }
  stats.empiricalErrorRate =
      1.0 - static_cast<double>(stats.successes) /
                static_cast<double>(stats.trials);
  stats.boundRHS_paper = 33.0 * stats.epsilonMax + crowd;
  stats.boundRHS_sen =
      2.0 * std::sqrt(crowd + 13.0 * std::sqrt(stats.epsilonMax));
  const double p = stats.empiricalErrorRate;
  stats.standardError =
      std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(stats.trials));
  stats.tightFraction = config.mode == DecodeMode::Exact
                            ? static_cast<double>(tight) /
                                  static_cast<double>(stats.trials)
                            : 0.0;
  return stats;
}

}  // namespace qub
