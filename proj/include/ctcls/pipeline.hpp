// Copyright 2026 The ctclassify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CTCLS_PIPELINE_HPP
#define CTCLS_PIPELINE_HPP

#include <iosfwd>
#include <string>

#include "ctcls/config.hpp"
#include "ctcls/report.hpp"
#include "ctcls/training.hpp"

namespace ctcls {

/// Commands: scan | train | evaluate | report | compare.
/// Inputs are validated before any artifact directory is created, so a
/// failing precondition leaves no partial outputs. Throws ctcls::Error
/// subclasses; the CLI maps them to exit codes (config 2, data 3,
/// training 4, io 5).
int run_pipeline(const PipelineConfig& config, const std::string& command,
                 std::ostream& out);

// Artifact (de)serialization shared by commands and tests.
nlohmann::ordered_json run_to_json(const TrainingRun& run,
                                   const PipelineConfig& config);
TrainingRun run_from_json(const nlohmann::json& j);

/// Rows from a fixtures file: {"rows": [{model, accuracy, comment}, ...]}.
std::vector<ComparisonRow> load_comparison_fixtures(
    const std::filesystem::path& path);

}  // namespace ctcls

#endif  // CTCLS_PIPELINE_HPP
