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

#include "qub/seqchain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qub {

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

/// Angle between unit vectors. The aligned component is subtracted before
/// measuring the orthogonal remainder, so collinear inputs yield 0 instead
/// of the sqrt(machine epsilon) noise an acos of their inner product gives.
double angle_between(const ComplexVector& a, const ComplexVector& b) {
  const std::complex<double> overlap = b.dot(a);
  const double sine = (a - b * overlap).norm();
  return std::atan2(sine, std::abs(overlap));
}

void validate_chain(const std::vector<Projector>& ps, Index dim,
                    const ResourceLimits& limits) {
  if (ps.empty()) {
    throw ValidationError("MeasurementChain: need at least one projector");
  }
  if (static_cast<std::size_t>(dim) > limits.maxDim) {
    throw ResourceError("MeasurementChain: dimension " + std::to_string(dim) +
                        " exceeds cap " + std::to_string(limits.maxDim));
  }
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].dim() != dim) {
      throw ShapeError("MeasurementChain: projector " + std::to_string(i + 1) +
                       " has dimension " + std::to_string(ps[i].dim()) +
                       ", state has " + std::to_string(dim));
    }
  }
}

/// Execution order of a straight run: 1..N.
std::vector<std::size_t> straight_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

/// Execution order of a back-and-forth run: 1..N, N-1..1.
std::vector<std::size_t> mirrored_order(std::size_t n) {
  std::vector<std::size_t> order = straight_order(n);
  for (std::size_t i = n - 1; i-- > 0;) order.push_back(i);
  return order;
}

ChainTrace run_order(const MeasurementChain& chain,
                     const std::vector<std::size_t>& order,
                     const RunOptions& opts, bool backAndForth) {
  ChainTrace trace;
  trace.dim = chain.dim();
  trace.pure = chain.pure();
  trace.backAndForth = backAndForth;
  trace.uniqueProjectors = chain.length();

  const DensityOperator rho0 = chain.initial_density();
  trace.initialTrace = rho0.trace();
  for (const Projector& p : chain.projectors) {
    const double keep = (p.matrix() * rho0.matrix()).trace().real();
    trace.epsilons.push_back(clamp01(1.0 - keep));
  }

  if (trace.pure) {
    const ComplexVector& psi0 = std::get<PureState>(chain.initial).amplitudes();
    ComplexVector cur = psi0;
    double product = 1.0;
    for (std::size_t s = 0; s < order.size(); ++s) {
      const Projector& p = chain.projectors[order[s]];
      const ComplexVector u = p.matrix() * cur;
      const double prob = u.squaredNorm();
      if (prob <= opts.tol.probFloor) {
        throw VanishingBranchError(s + 1, prob, std::move(trace));
      }
      const ComplexVector next = u / std::sqrt(prob);

      trace.stepProbabilities.push_back(prob);
      product *= prob;
      trace.thetas.push_back(angle_between(next, cur));
      const ComplexVector proj0 = p.matrix() * psi0;
      const double cosAlpha = proj0.norm();
      const double alpha = std::atan2((psi0 - proj0).norm(), cosAlpha);
      trace.alphas.push_back(alpha);
      const double beta = angle_between(next, psi0);
      trace.betas.push_back(beta);
      double gamma = std::asin(1.0);
      if (cosAlpha > 1e-12) gamma = angle_between(next, proj0 / cosAlpha);
      trace.gammas.push_back(gamma);
      trace.betaResiduals.push_back(
          std::abs(std::cos(beta) - std::cos(alpha) * std::cos(gamma)));

      if (opts.keepIntermediates) {
        trace.intermediateStates.push_back(
            DensityOperator::unchecked(next * next.adjoint()));
      }
      cur = next;
      if (backAndForth && s + 1 == chain.length()) {
        trace.forwardTraceDistance = trace_norm(
            psi0 * psi0.adjoint() - cur * cur.adjoint(), opts.tol);
      }
    }
    trace.successProbability = product;
    ComplexVector w = psi0;
    for (std::size_t s : order) w = chain.projectors[s].matrix() * w;
    trace.directSuccessProbability = w.squaredNorm();
    const ComplexMatrix finalDensity = cur * cur.adjoint();
    trace.finalState = DensityOperator::unchecked(finalDensity);
    trace.traceDistance =
        trace_norm(psi0 * psi0.adjoint() - finalDensity, opts.tol);
    return trace;
  }

  ComplexMatrix cur = rho0.matrix() / trace.initialTrace;
  double product = 1.0;
  for (std::size_t s = 0; s < order.size(); ++s) {
    const Projector& p = chain.projectors[order[s]];
    const double prob = (p.matrix() * cur).trace().real();
    if (prob <= opts.tol.probFloor) {
      throw VanishingBranchError(s + 1, prob, std::move(trace));
    }
    ComplexMatrix next = p.matrix() * cur * p.matrix() / prob;
    next = 0.5 * (next + next.adjoint().eval());

    trace.stepProbabilities.push_back(prob);
    product *= prob;
    if (opts.keepIntermediates) {
      trace.intermediateStates.push_back(DensityOperator::unchecked(next));
    }
    cur = next;
    if (backAndForth && s + 1 == chain.length()) {
      trace.forwardTraceDistance =
          trace_norm(rho0.matrix() - trace.initialTrace * cur, opts.tol);
    }
  }
  trace.successProbability = trace.initialTrace * product;
  ComplexMatrix acc = rho0.matrix();
  for (std::size_t s : order) {
    const ComplexMatrix& p = chain.projectors[s].matrix();
    acc = p * acc * p;
  }
  trace.directSuccessProbability = acc.trace().real();
  trace.finalState = DensityOperator::unchecked(cur);
  trace.traceDistance =
      trace_norm(rho0.matrix() - trace.initialTrace * cur, opts.tol);
  return trace;
}

}  // namespace

MeasurementChain::MeasurementChain(std::vector<Projector> ps, PureState psi,
                                   const ResourceLimits& limits)
    : projectors(std::move(ps)), initial(std::move(psi)) {
  validate_chain(projectors, std::get<PureState>(initial).dim(), limits);
}

MeasurementChain::MeasurementChain(std::vector<Projector> ps,
                                   DensityOperator rho,
                                   const ResourceLimits& limits)
    : projectors(std::move(ps)), initial(std::move(rho)) {
  validate_chain(projectors, std::get<DensityOperator>(initial).dim(), limits);
}

Index MeasurementChain::dim() const {
  return std::visit([](const auto& s) { return s.dim(); }, initial);
}

DensityOperator MeasurementChain::initial_density() const {
  if (pure()) return DensityOperator::from_pure(std::get<PureState>(initial));
  return std::get<DensityOperator>(initial);
}

double ChainTrace::epsilon_sum() const {
  return std::accumulate(epsilons.begin(), epsilons.end(), 0.0);
}

double ChainTrace::executed_epsilon_sum() const {
  double s = epsilon_sum();
  if (backAndForth && !epsilons.empty()) {
    s = 2.0 * s - epsilons.back();
  }
  return s;
}

VanishingBranchError::VanishingBranchError(std::size_t step, double probability,
                                           ChainTrace partial)
    : Error("vanishing branch at step " + std::to_string(step) +
            " (probability " + std::to_string(probability) + ")"),
      step_(step),
      probability_(probability),
      partial_(std::move(partial)) {}

std::pair<DensityOperator, double> apply_projector(const Projector& p,
                                                   const DensityOperator& rho,
                                                   const Tolerances& tol) {
  if (p.dim() != rho.dim()) {
    throw ShapeError("apply_projector: projector and state dimensions differ");
  }
  const double joint = (p.matrix() * rho.matrix()).trace().real();
  const double cond = joint / rho.trace();
  if (cond <= tol.probFloor) {
    throw VanishingBranchError(1, cond, ChainTrace{});
  }
  ComplexMatrix post = p.matrix() * rho.matrix() * p.matrix() / joint;
  post = 0.5 * (post + post.adjoint().eval());
  return {DensityOperator::unchecked(std::move(post)), cond};
}

ChainTrace run_chain(const MeasurementChain& chain, const RunOptions& opts) {
  return run_order(chain, straight_order(chain.length()), opts, false);
}

ChainTrace extract_angles(const MeasurementChain& chain,
                          const RunOptions& opts) {
  if (!chain.pure()) {
    throw ValidationError(
        "extract_angles: initial state is mixed and has no single-vector "
        "trigonometric picture; lift the chain with purified_chain() (initial "
        "state becomes a purification, projectors become I (x) P) and extract "
        "on the lifted chain");
  }
  // The conditioned-state picture needs every P_i psi_0 to be renormalizable,
  // not just the probabilities along the executed record.
  const ComplexVector& psi0 = std::get<PureState>(chain.initial).amplitudes();
  for (std::size_t i = 0; i < chain.length(); ++i) {
    const double keep = (chain.projectors[i].matrix() * psi0).squaredNorm();
    if (keep <= opts.tol.probFloor) {
      ChainTrace partial;
      partial.dim = chain.dim();
      partial.pure = true;
      partial.uniqueProjectors = chain.length();
      throw VanishingBranchError(i + 1, keep, std::move(partial));
    }
  }
  return run_chain(chain, opts);
}

ChainTrace run_back_and_forth(const MeasurementChain& chain,
                              const RunOptions& opts) {
  return run_order(chain, mirrored_order(chain.length()), opts, true);
}

double chain_success_probability(const MeasurementChain& chain) {
  if (chain.pure()) {
    ComplexVector w = std::get<PureState>(chain.initial).amplitudes();
    for (const Projector& p : chain.projectors) w = p.matrix() * w;
    return w.squaredNorm();
  }
  ComplexMatrix acc = std::get<DensityOperator>(chain.initial).matrix();
  for (const Projector& p : chain.projectors) {
    acc = p.matrix() * acc * p.matrix();
  }
  return acc.trace().real();
}

MeasurementChain purified_chain(const MeasurementChain& chain,
                                const ResourceLimits& limits) {
  if (chain.pure()) return chain;
  const DensityOperator& rho = std::get<DensityOperator>(chain.initial);
  const Index d = rho.dim();
  if (static_cast<std::size_t>(d) * static_cast<std::size_t>(d) >
      limits.maxDim) {
    throw ResourceError("purified_chain: purification dimension " +
                        std::to_string(d * d) + " exceeds cap " +
                        std::to_string(limits.maxDim));
  }
  PureState psi = purify(rho);
  std::vector<Projector> lifted;
  lifted.reserve(chain.length());
  for (const Projector& p : chain.projectors) {
    lifted.push_back(lift_projector(p, d));
  }
  return MeasurementChain(std::move(lifted), std::move(psi), limits);
}

}  // namespace qub
