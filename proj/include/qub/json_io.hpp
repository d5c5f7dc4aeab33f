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

#ifndef QUB_JSON_IO_HPP
#define QUB_JSON_IO_HPP

#include <string>

#include "json.hpp"
#include "qub/seqchain.hpp"
#include "qub/seqdecode.hpp"

namespace qub {

using Json = nlohmann::json;

/// {"rows": r, "cols": c, "data": [[re, im], ...]} row-major; a vector is a
/// single-column matrix. Round-trips preserve values to 1e-15 relative.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

/// {"psi"|"rho": <matrix>, "projectors": [<matrix>, ...]}; subnormalized
/// density inputs are detected from the trace.
Json chain_to_json(const MeasurementChain& chain);
MeasurementChain chain_from_json(const Json& j,
                                 const ResourceLimits& limits = default_limits(),
                                 const Tolerances& tol = default_tolerances());

Json trace_to_json(const ChainTrace& trace);

/// {"prior": [p_0, ...], "outputs": [<matrix>, ...]}.
Json channel_to_json(const CqChannel& ch);
CqChannel channel_from_json(const Json& j,
                            const Tolerances& tol = default_tolerances());

/// Per-trial CSV with header:
/// trial,n,rate,delta,success,p_c_exact,corollary1_rhs,paper_bound_rhs,sen_bound_rhs
std::string decode_stats_csv(const DecodeStats& stats,
                             const ExperimentConfig& config);
Json decode_stats_summary(const DecodeStats& stats);

/// Parses a JSON file; parse failures surface as ValidationError carrying the
/// parser's line/column message prefixed with the path.
Json load_json_file(const std::string& path);
void save_text_file(const std::string& path, const std::string& text);

/// Doubles formatted for CSV cells (%.17g, round-trip exact).
std::string format_double(double v);

}  // namespace qub

#endif
