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

#include "qub/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

namespace qub {

namespace {

Json double_pair(Complex z) { return Json::array({z.real(), z.imag()}); }

const Json& require(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw ValidationError(std::string("missing JSON key \"") + key + '"');
  }
  return *it;
}

}  // namespace

Json matrix_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      data.push_back(double_pair(m(r, c)));
    }
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_object()) {
    throw ValidationError("matrix JSON must be an object");
  }
  const auto rows = require(j, "rows").get<long long>();
  const auto cols = require(j, "cols").get<long long>();
  const Json& data = require(j, "data");
  if (rows < 0 || cols < 0 || !data.is_array() ||
      data.size() != static_cast<std::size_t>(rows * cols)) {
    throw ValidationError("matrix JSON: data length does not match rows*cols");
  }
  ComplexMatrix m(rows, cols);
  std::size_t k = 0;
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c, ++k) {
      const Json& cell = data[k];
      if (!cell.is_array() || cell.size() != 2) {
        throw ValidationError("matrix JSON: entries must be [re, im] pairs");
      }
      m(r, c) = Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return m;
}

Json chain_to_json(const MeasurementChain& chain) {
  Json j;
  if (chain.pure()) {
    const ComplexVector& psi = std::get<PureState>(chain.initial).amplitudes();
    j["psi"] = matrix_to_json(psi);
  } else {
    const DensityOperator& rho = std::get<DensityOperator>(chain.initial);
    j["rho"] = matrix_to_json(rho.matrix());
    if (rho.trace() < 1.0 - 1e-9) j["subnormalized"] = true;
  }
  Json ps = Json::array();
  for (const Projector& p : chain.projectors) {
    ps.push_back(matrix_to_json(p.matrix()));
  }
  j["projectors"] = std::move(ps);
  return j;
}

MeasurementChain chain_from_json(const Json& j, const ResourceLimits& limits,
                                 const Tolerances& tol) {
  const Json& ps = require(j, "projectors");
  if (!ps.is_array() || ps.empty()) {
    throw ValidationError("chain JSON: \"projectors\" must be a non-empty array");
  }
  std::vector<Projector> projectors;
  projectors.reserve(ps.size());
  for (const Json& pj : ps) {
    projectors.emplace_back(matrix_from_json(pj), tol);
  }
  if (j.contains("psi")) {
    ComplexMatrix amp = matrix_from_json(j["psi"]);
    if (amp.cols() != 1) {
      throw ValidationError("chain JSON: \"psi\" must be a single-column matrix");
    }
    return MeasurementChain(std::move(projectors),
                            PureState(ComplexVector(amp.col(0)), tol), limits);
  }
  ComplexMatrix rho = matrix_from_json(require(j, "rho"));
  const double tr = rho.trace().real();
  DensityOperator state = std::abs(tr - 1.0) <= tol.abs
                              ? DensityOperator::make(std::move(rho), tol)
                              : DensityOperator::subnormalized(std::move(rho), tol);
  return MeasurementChain(std::move(projectors), std::move(state), limits);
}

Json trace_to_json(const ChainTrace& trace) {
  Json j{{"theta", trace.thetas},
         {"alpha", trace.alphas},
         {"beta", trace.betas},
         {"gamma", trace.gammas},
         {"stepProb", trace.stepProbabilities},
         {"success", trace.successProbability},
         {"traceDistance", trace.traceDistance},
         {"epsilon", trace.epsilons},
         {"betaResidual", trace.betaResiduals},
         {"directSuccess", trace.directSuccessProbability},
         {"epsilonSum", trace.epsilon_sum()},
         {"initialTrace", trace.initialTrace},
         {"dim", trace.dim},
         {"pure", trace.pure},
         {"backAndForth", trace.backAndForth}};
  if (trace.forwardTraceDistance) {
    j["forwardTraceDistance"] = *trace.forwardTraceDistance;
  }
  return j;
}

Json channel_to_json(const CqChannel& ch) {
  Json outputs = Json::array();
  for (const DensityOperator& s : ch.outputs) {
    outputs.push_back(matrix_to_json(s.matrix()));
  }
  return Json{{"prior", ch.prior}, {"outputs", std::move(outputs)}};
}

CqChannel channel_from_json(const Json& j, const Tolerances& tol) {
  const Json& prior = require(j, "prior");
  const Json& outputs = require(j, "outputs");
  if (!prior.is_array() || !outputs.is_array()) {
    throw ValidationError("channel JSON: \"prior\" and \"outputs\" must be arrays");
  }
  std::vector<DensityOperator> states;
  states.reserve(outputs.size());
  for (const Json& oj : outputs) {
    states.push_back(DensityOperator::make(matrix_from_json(oj), tol));
  }
  return CqChannel(prior.get<std::vector<double>>(), std::move(states), tol);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string decode_stats_csv(const DecodeStats& stats,
                             const ExperimentConfig& config) {
  std::ostringstream out;
  out << "trial,n,rate,delta,success,p_c_exact,corollary1_rhs,"
         "paper_bound_rhs,sen_bound_rhs\n";
  for (const DecodeTrialRecord& rec : stats.records) {
    out << rec.trial << ',' << config.blockLength << ','
        << format_double(config.rate) << ',' << format_double(config.delta)
        << ',' << (rec.success ? 1 : 0) << ','
        << (std::isnan(rec.pcExact) ? "nan" : format_double(rec.pcExact)) << ','
        << format_double(rec.corollary1Rhs) << ','
        << format_double(rec.paperRhs) << ',' << format_double(rec.senRhs)
        << '\n';
  }
  return out.str();
}

Json decode_stats_summary(const DecodeStats& stats) {
  return Json{{"trials", stats.trials},
              {"successes", stats.successes},
              {"empiricalErrorRate", stats.empiricalErrorRate},
              {"standardError", stats.standardError},
              {"holevo", stats.holevo},
              {"epsilonMax", stats.epsilonMax},
              {"paperBoundRHS", stats.boundRHS_paper},
              {"senBoundRHS", stats.boundRHS_sen},
              {"tightFraction", stats.tightFraction}};
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open " + path);
  }
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& err) {
    throw ValidationError(path + ": " + err.what());
  }
}

void save_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) {
    throw ValidationError("cannot open " + path + " for writing");
  }
  out << text;
  if (!out) {
    throw ValidationError("failed writing " + path);
  }
}

}  // namespace qub
