#pragma once

#include "exitmoments/comparison.hpp"
#include "exitmoments/moments.hpp"
#include "exitmoments/radial_field.hpp"
#include "exitmoments/rearrange.hpp"
#include "exitmoments/spectral.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace exitmoments::io {

using json = nlohmann::ordered_json;

/// Finite numbers as-is, ±∞ and NaN as null.
json number(double value);

json to_json(const MomentSequence& moments);
json to_json(const TruncatedMoments& moments);
json to_json(const SpectralData& spectrum);
json to_json(const RecoveryResult& result);
json to_json(const EigenBoundReport& report);
json to_json(const ComparisonReport& report);
json to_json(const PdeComparisonReport& report);
json to_json(const CheegerReport& report);
json to_json(const FaberKrahnReport& report);

/// Schema readers. Besides the schema keys only "tail_bound", "source" and
/// "timestamp" are tolerated; anything else is rejected as InvalidInput.
MomentSequence moments_from_json(const json& j);
SpectralData spectral_from_json(const json& j);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

/// CSV with header "r,<column>".
void write_radial_csv(std::ostream& out, const RadialField& field, const std::string& column = "value");

/// Several profiles on a common grid: header "r,<names...>".
void write_profiles_csv(std::ostream& out, const std::vector<RadialField>& fields,
                        const std::vector<std::string>& names);

/// (value, weight) rows; an optional first line "value,weight" is skipped.
WeightedSample read_weighted_csv(std::istream& in, double ambient_volume);

} // namespace exitmoments::io
