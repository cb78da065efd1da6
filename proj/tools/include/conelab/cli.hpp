/*
   Copyright 2026 The conelab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace conelab::cli {

/// Process exit codes. Fail means the command ran to completion but a pass
/// flag was false.
enum ExitCode : int
{
    kExitPass = 0,
    kExitFail = 1,
    kExitUsage = 2,
    kExitDomain = 3,
    kExitBudget = 4,
    kExitPartial = 5,
};

struct RunConfig
{
    std::string command; ///< volume, verify, sweep, extremize or report
    std::string spec;
    std::string out;
    std::uint64_t seed = 42;
    bool seed_given = false;
    int threads = 0; ///< 0 keeps CONELAB_THREADS (or 1)
    std::int64_t samples = 0;
    std::int64_t trials = 0;
    std::optional<double> tol;
    std::optional<std::array<int, 3>> dims;
    std::string lemma;
    std::string estimate;
    bool timing = false;
};

/// "64x64x32" -> {64, 64, 32}. ParseError otherwise.
std::array<int, 3> parse_dims(const std::string& text);

/**
 * Flat `key = value` file. Blank lines and lines starting with '#' are
 * skipped; keys are long flag names without the dashes.
 */
std::map<std::string, std::string> read_config_file(const std::string& path);

/**
 * Parses argv into a RunConfig. Values from --config are applied first and
 * explicit flags override them. Throws ParseError on usage errors; --help
 * output goes to `out` and yields a config with an empty command.
 */
RunConfig parse_run_config(int argc, const char* const* argv, std::ostream& out);

int cmd_volume(const RunConfig& cfg, std::ostream& out);
int cmd_verify(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_extremize(const RunConfig& cfg, std::ostream& out);
int cmd_report(const RunConfig& cfg, std::ostream& out);

/// Parse, dispatch and map exceptions onto exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace conelab::cli
