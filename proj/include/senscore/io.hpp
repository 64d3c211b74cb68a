#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "senscore/coreset.hpp"
#include "senscore/fitters.hpp"
#include "senscore/point_set.hpp"
#include "senscore/sensitivity.hpp"
#include "senscore/shapes.hpp"

namespace senscore {

inline constexpr int kSchemaVersion = 1;

// --- CSV -------------------------------------------------------------------
// One point per row, d numeric columns; when `weight_column` is set the last
// column is read as the point weight.
PointSet read_points_csv(const std::filesystem::path& path, bool weight_column);
void write_points_csv(const std::filesystem::path& path, const PointSet& P, bool weight_column);

// --- JSON ------------------------------------------------------------------
nlohmann::json shape_to_json(const Shape& s);
Shape shape_from_json(const nlohmann::json& j);

nlohmann::json fit_to_json(const FitResult& fit, Family family, const FamilyParams& params,
                           const DistanceConfig& cfg);
// Returns the fit plus the family/params/z it was produced for.
struct StoredFit {
  FitResult fit;
  Family family = Family::KCenters;
  FamilyParams params;
  double z = 2.0;
};
StoredFit fit_from_json(const nlohmann::json& j);

nlohmann::json profile_to_json(const SensitivityProfile& profile, const PointSet& P);
SensitivityProfile profile_from_json(const nlohmann::json& j);

nlohmann::json coreset_to_json(const Coreset& coreset, const PointSet& P);
Coreset coreset_from_json(const nlohmann::json& j);

nlohmann::json eval_report_to_json(const EvalReport& report);

// Canonical serialization: sorted keys, two-space indent, trailing newline.
// Artifacts are byte-stable for identical inputs.
std::string canonical_dump(const nlohmann::json& j);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

// FNV-1a over the canonical dump; used as the provenance config hash.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace senscore
