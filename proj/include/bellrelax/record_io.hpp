#pragma once

// Serialization of run products: record JSON, plot-ready CSV tables and
// file checksums for manifests.

#include "bellrelax/analysis.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace bellrelax {

inline constexpr int kRecordSchemaVersion = 1;

nlohmann::json record_to_json(const RelaxationRecord& record);
/// Throws ValidationError on a missing field or schema version mismatch.
RelaxationRecord record_from_json(const nlohmann::json& doc);

/// t_over_L,s,re_lambda,im_lambda,abs_lambda
void write_spectrum_csv(std::ostream& out, const std::vector<SpectrumSnapshot>& snapshots,
                        bool header = true);

/// t_over_L,c,c_stderr,r2,dispersion,v0_tv_distance (empty when degenerate)
void write_fit_csv(std::ostream& out, const RelaxationRecord& record);

/// One row per sweep point with the relaxation fit summary.
void write_sweep_csv(std::ostream& out, const std::string& axis,
                     const std::vector<std::string>& values,
                     const std::vector<RelaxationRecord>& records);

/// model,x,y,y_err,origin rows followed by nothing else.
void write_scaling_csv(std::ostream& out, const ScalingFit& fit);

/// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace bellrelax
