#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "opmean/barycenter.hpp"
#include "opmean/hermitian.hpp"
#include "opmean/mean.hpp"
#include "opmean/measure.hpp"

namespace opmean {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Matrix JSON: {"dim": n, "entries": [[[re,im], ...], ...]} row-major.
// Readers also accept bare numbers for real entries; writers always emit pairs.
nlohmann::json matrix_to_json(const HermitianMatrix& x);
HermitianMatrix matrix_from_json(const nlohmann::json& j);
void write_matrix_file(const std::filesystem::path& path, const HermitianMatrix& x);
HermitianMatrix read_matrix_file(const std::filesystem::path& path);
SpdMatrix read_spd_file(const std::filesystem::path& path);

// Measure JSON: {"atoms": [[lambda, w], ...],
//                "density": {"family": "jacobi"|"legendre", "p": <real>, "nodes": N}}.
nlohmann::json measure_to_json(const GeneratorMeasure& mu);
GeneratorMeasure measure_from_json(const nlohmann::json& j);
void write_measure_file(const std::filesystem::path& path, const GeneratorMeasure& mu);
GeneratorMeasure read_measure_file(const std::filesystem::path& path);

// Ensemble JSON: {"weights": [...], "matrices": [<matrix JSON>, ...]}.
nlohmann::json ensemble_to_json(const WeightedEnsemble& ensemble);
WeightedEnsemble ensemble_from_json(const nlohmann::json& j);
void write_ensemble_file(const std::filesystem::path& path, const WeightedEnsemble& ensemble);
WeightedEnsemble read_ensemble_file(const std::filesystem::path& path);

// SolverReport JSON: {"converged": bool, "iterations": n, "final_residual": r,
//                     "residual_history": [...], "objective": q}.
nlohmann::json report_to_json(const SolverReport& report);
SolverReport report_from_json(const nlohmann::json& j);
void write_report_file(const std::filesystem::path& path, const SolverReport& report);

/// Mean descriptor strings: "arithmetic:0.5", "geometric:0.5", "harmonic:0.3",
/// "ah-geo:0.25", "heinz:0.25", "parallel-sum", "logmean", "#"
/// (alias for geometric:0.5), "measure:<path>".
MeanDescriptor parse_mean_string(std::string_view spec);

/// Measure strings: "dirac:0.5", "endpoints:0.5", "jacobi:0.5" (optional
/// ":<nodes>" suffix), "uniform", or a path to a measure JSON file.
GeneratorMeasure parse_measure_string(std::string_view spec);

/// Echo of one CLI invocation; round-trips through JSON losslessly.
/// The timestamp honors SOURCE_DATE_EPOCH when set, for reproducible output.
struct RunManifest {
    std::string command;
    std::vector<std::string> inputs;
    std::string config_text;            // config echo, serialized key=value lines
    std::uint64_t seed = 0;
    std::string version = std::string(kToolVersion);
    std::string timestamp;
};

nlohmann::json manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);
std::string current_timestamp();  // ISO-8601 UTC; SOURCE_DATE_EPOCH wins if set

/// Canonical serialization used for every file the CLI writes: 2-space indent,
/// sorted keys, trailing newline. Shortest-round-trip doubles make the output
/// byte-stable for identical values.
std::string canonical_dump(const nlohmann::json& j);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace opmean
