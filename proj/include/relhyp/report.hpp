#pragma once

#include "relhyp/ct_harness.hpp"
#include "relhyp/geometry_params.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace relhyp {

struct ExperimentConfig {
    std::string gen_spec;     // one of gen_spec / input_path must be set
    std::string input_path;
    std::optional<Rat> D_override;
    std::optional<Rat> C_override;
    int depth = 0;  // 0 = default
    long long N_begin = 1;
    long long N_end = 4;
    long long budget = 200;
    unsigned long long seed = 1;
    std::string out_dir;
    int jobs = 0;  // 0 = library default

    void validate() const;
};

struct SuiteResult {
    std::string name;
    bool pass = true;
    std::string detail;
};

/// Everything one experiment produced: the parameter snapshot with
/// provenance, the invariant suite outcomes, and the measured profile.
/// Timings are kept apart from the deterministic payload so reruns with
/// one seed stay byte-identical.
struct ReportDocument {
    std::string instance_id;
    GeometryParams params;
    std::vector<SuiteResult> suites;
    CTProfile profile;
    std::map<std::string, double> timings_sec;

    bool all_pass() const;
};

ReportDocument run_experiment(const ExperimentConfig& cfg);

/// Deterministic payload (no timings).
nlohmann::json report_to_json(const ReportDocument& rep);

/// Measures the standing constants of one instance: delta on the root
/// glued space, D (configured or 4*delta+1), C1 from tripod tracking, C2
/// from edge-image quasiconvexity.
GeometryParams measure_standing_params(const TreeGeometry& geo, const ExperimentConfig& cfg);

}  // namespace relhyp
