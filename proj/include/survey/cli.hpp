#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "survey/engine.hpp"
#include "survey/potts_certify.hpp"

namespace survey {

// Parsed form of a run configuration file. The file is INI-style: [model],
// [schedule], [certify], [oracle], [table] and [output] blocks of key = value
// lines, '#' comments, rationals written as integers, fractions or exact
// decimals. See parse_config for the accepted keys.
struct RunConfig {
    // [model]
    std::size_t q = 3;
    Rational lambda;
    DegreeDistribution degree;
    bool symmetric = true;

    // [schedule]
    unsigned iterations = 0;
    struct PlanEntry {
        unsigned from_iteration = 1;
        std::string skeleton;  // "grid:m", "star:r1,r2,...", or "file:path"
    };
    std::vector<PlanEntry> plan;
    unsigned long rounding_denominator = 0;
    std::size_t support_cap = 0;

    // [certify]
    unsigned subintervals = 16;
    std::optional<Rational> x_hat;  // skip the engine and certify directly

    // [oracle]
    unsigned oracle_depth = 2;

    // [table]
    std::vector<DegreeDistribution> table_rows;

    // [output]
    std::string trace_file = "trace.csv";
    std::string report_file = "certificate.txt";
    std::string oracle_file = "oracle.txt";
    std::string table_file = "table.txt";

    void validate() const;
};

// Throws std::runtime_error with a line number on syntax errors and unknown
// keys; semantic violations surface through validate().
RunConfig parse_config(std::istream& in);
RunConfig parse_config_file(const std::string& path);

// Canonical text form; parse(serialize(c)) == c and serialization is a
// fixed point, so outputs can cite the hash of the canonical form.
std::string serialize_config(const RunConfig& config);
// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& config);

// Model/schedule assembly (resolves skeleton specs, loading files relative
// to the current directory).
ModelSpec make_model(const RunConfig& config);
Schedule make_schedule(const RunConfig& config, const ModelSpec& model);

// Subcommand drivers. Artifacts land in out_dir (created if missing), the
// human-readable summary goes to log. Returned exit codes: 0 success or
// certified, 1 not certified / mismatch, 2 input error, 3 budget refusal.
int cmd_run(const RunConfig& config, const std::string& out_dir, std::ostream& log);
int cmd_certify(const RunConfig& config, const std::string& out_dir, std::ostream& log);
int cmd_oracle(const RunConfig& config, const std::string& out_dir, std::ostream& log);
int cmd_table(const RunConfig& config, const std::string& out_dir, std::ostream& log);

}  // namespace survey
