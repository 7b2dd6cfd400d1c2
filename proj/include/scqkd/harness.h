// Copyright 2026 The scqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SCQKD_HARNESS_H
#define SCQKD_HARNESS_H

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scqkd/analysis.h"
#include "scqkd/protocol.h"

namespace scqkd {

constexpr std::string_view ARTIFACT_VERSION = "1.0.0";
/// Environment variable naming the default output directory.
constexpr const char *OUT_DIR_ENV = "SCQKD_OUT_DIR";

/// Bad flags, bad values, or a missing required flag.
class UsageError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Flat key/value configuration keyed by flag name without the leading dashes.
using ConfigMap = std::map<std::string, std::string>;

struct SweepRequest {
    double start = 0;
    double end = 0;
    size_t steps = 0;
};

struct RunRequest {
    SessionConfig session;
    std::optional<SweepRequest> sweep;
    std::filesystem::path out_dir;
    double min_visibility = 0.95;
    /// nullopt means the security threshold e*.
    std::optional<double> max_error;
};

/// Parses a flat JSON object of flag-named keys. A run manifest is accepted
/// too; its "config" object is used.
ConfigMap load_config_file(const std::filesystem::path &path);

/// Builds and validates a request from key/values. Throws UsageError.
RunRequest request_from_map(const ConfigMap &values);

/// Canonical key/value echo of a request; request_from_map inverts it.
ConfigMap request_to_map(const RunRequest &request);

/// Command-line parsing (args exclude the program name). `--config FILE`
/// loads a file first; flags given on the command line override it.
RunRequest parse_config(const std::vector<std::string> &args);

enum class Verdict { Accept, Abort };

std::string_view verdict_name(Verdict v);

/// Abort check on the public test set: V >= min_visibility and e <= max_error.
Verdict decide(const SiftResult &sifted, double min_visibility, double max_error);

struct RunManifest {
    ConfigMap config;
    std::string version;
    uint64_t seed = 0;
    double wall_seconds = 0;
    std::vector<std::string> outputs;
    std::optional<Verdict> verdict;
};

/// Executes a session or a sweep and writes the output files.
RunManifest run(const RunRequest &request);

/// Exit code for a finished run: 0 accept (or sweep), 2 abort.
int exit_code(const RunManifest &manifest);

/// printf("%.12g").
std::string format_double(double x);

/// Per-round CSV with header index,alice,bob,outcome,bit,t_s,t_r,pol_sent,pol_basis,pol_result.
std::string records_csv(std::span<const RoundRecord> records);
/// Sweep CSV with header theta,V,e,I_E,I_AB,K.
std::string sweep_csv(const SecurityCurve &curve);

}  // namespace scqkd

#endif
