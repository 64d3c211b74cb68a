#include "senscore/io.hpp"

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "senscore/errors.hpp"

namespace senscore {

using nlohmann::json;

PointSet read_points_csv(const std::filesystem::path& path, bool weight_column) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open points file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("malformed numeric cell in " + path.string() + ": '" + cell + "'");
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError("no points in " + path.string());
  const std::size_t cols = rows.front().size();
  for (const auto& row : rows) {
    if (row.size() != cols) throw InputError("ragged CSV rows in " + path.string());
  }
  const std::size_t d = weight_column ? cols - 1 : cols;
  if (d < 1) throw InputError("points need at least one coordinate column");

  Eigen::MatrixXd coords(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) coords(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    if (weight_column) weights[static_cast<Eigen::Index>(i)] = rows[i][d];
  }
  return PointSet(std::move(coords), std::move(weights));
}

void write_points_csv(const std::filesystem::path& path, const PointSet& P, bool weight_column) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write points file: " + path.string());
  out.precision(17);
  for (Eigen::Index i = 0; i < P.size(); ++i) {
    for (Eigen::Index j = 0; j < P.dim(); ++j) {
      if (j > 0) out << ',';
      out << P.coords(i, j);
    }
    if (weight_column) out << ',' << P.weights[i];
    out << '\n';
  }
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vec_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vec_to_json(m.row(r).transpose()));
  return out;
}

Eigen::MatrixXd mat_from_json(const json& j, Eigen::Index cols_hint = 0) {
  if (j.empty()) return Eigen::MatrixXd(0, cols_hint);
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) m.row(r) = vec_from_json(j[static_cast<std::size_t>(r)]).transpose();
  return m;
}

json flat_to_json(const JFlat& f) {
  return json{{"anchor", vec_to_json(f.anchor)}, {"basis", mat_to_json(f.basis)}};
}

JFlat flat_from_json(const json& j) {
  JFlat f;
  f.anchor = vec_from_json(j.at("anchor"));
  f.basis = mat_from_json(j.at("basis"), f.anchor.size());
  return f;
}

}  // namespace

json shape_to_json(const Shape& s) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, KPointSet>) {
          return json{{"variant", "kpoints"}, {"centers", mat_to_json(v.centers)}};
        } else if constexpr (std::is_same_v<T, KLineSet>) {
          json lines = json::array();
          for (const auto& line : v.lines) {
            lines.push_back(json{{"anchor", vec_to_json(line.anchor)}, {"direction", vec_to_json(line.direction)}});
          }
          return json{{"variant", "klines"}, {"lines", lines}};
        } else if constexpr (std::is_same_v<T, JFlat>) {
          json out = flat_to_json(v);
          out["variant"] = "jflat";
          return out;
        } else {
          json flats = json::array();
          for (const auto& flat : v.flats) flats.push_back(flat_to_json(flat));
          return json{{"variant", "kjflats"}, {"flats", flats}};
        }
      },
      s.value);
}

Shape shape_from_json(const json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "kpoints") {
    return Shape::kpoints(mat_from_json(j.at("centers")));
  }
  if (variant == "klines") {
    std::vector<Line> lines;
    for (const auto& lj : j.at("lines")) {
      lines.push_back(Line{vec_from_json(lj.at("anchor")), vec_from_json(lj.at("direction"))});
    }
    return Shape::klines(std::move(lines));
  }
  if (variant == "jflat") {
    return Shape::jflat(flat_from_json(j));
  }
  if (variant == "kjflats") {
    std::vector<JFlat> flats;
    for (const auto& fj : j.at("flats")) flats.push_back(flat_from_json(fj));
    return Shape::kjflats(std::move(flats));
  }
  throw InputError("unknown shape variant: " + variant);
}

json fit_to_json(const FitResult& fit, Family family, const FamilyParams& params, const DistanceConfig& cfg) {
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "fit";
  j["family"] = family_name(family);
  j["k"] = params.k;
  j["j"] = params.j;
  j["z"] = cfg.z;
  j["cost"] = fit.cost;
  j["approx_factor_c"] = fit.approx_factor_c;
  j["method"] = fit.method;
  j["seed"] = fit.seed;
  j["shape"] = shape_to_json(fit.shape);
  return j;
}

StoredFit fit_from_json(const json& j) {
  StoredFit out;
  out.family = family_from_name(j.at("family").get<std::string>());
  out.params.k = j.at("k").get<int>();
  out.params.j = j.at("j").get<int>();
  out.z = j.at("z").get<double>();
  out.fit.shape = shape_from_json(j.at("shape"));
  out.fit.cost = j.at("cost").get<double>();
  out.fit.approx_factor_c = j.at("approx_factor_c").get<double>();
  out.fit.method = j.at("method").get<std::string>();
  out.fit.seed = j.at("seed").get<std::uint64_t>();
  return out;
}

json profile_to_json(const SensitivityProfile& profile, const PointSet& P) {
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "sensitivity_profile";
  j["method"] = profile.method;
  j["flags"] = json{{"loose", profile.loose},
                    {"lower_bound", profile.lower_bound},
                    {"floor_mixed", profile.floor_mixed}};
  j["floor_gamma"] = profile.floor_gamma;
  j["total"] = profile.total;
  j["unclamped_total"] = profile.unclamped_total;
  j["reduction_dim"] = profile.reduction_dim;
  j["ids"] = P.ids;
  j["bounds"] = vec_to_json(profile.bounds);
  if (profile.fit.has_value()) {
    j["fit"] = json{{"method", profile.fit->method},
                    {"cost", profile.fit->cost},
                    {"approx_factor_c", profile.fit->approx_factor_c},
                    {"seed", profile.fit->seed},
                    {"shape", shape_to_json(profile.fit->shape)}};
  }
  return j;
}

SensitivityProfile profile_from_json(const json& j) {
  SensitivityProfile p;
  p.method = j.at("method").get<std::string>();
  p.loose = j.at("flags").at("loose").get<bool>();
  p.lower_bound = j.at("flags").at("lower_bound").get<bool>();
  p.floor_mixed = j.at("flags").at("floor_mixed").get<bool>();
  p.floor_gamma = j.at("floor_gamma").get<double>();
  p.total = j.at("total").get<double>();
  p.unclamped_total = j.at("unclamped_total").get<double>();
  p.reduction_dim = j.at("reduction_dim").get<int>();
  p.bounds = vec_from_json(j.at("bounds"));
  if (j.contains("fit")) {
    FitResult fit;
    fit.method = j["fit"].at("method").get<std::string>();
    fit.cost = j["fit"].at("cost").get<double>();
    fit.approx_factor_c = j["fit"].at("approx_factor_c").get<double>();
    fit.seed = j["fit"].at("seed").get<std::uint64_t>();
    fit.shape = shape_from_json(j["fit"].at("shape"));
    p.fit = std::move(fit);
  }
  return p;
}

json coreset_to_json(const Coreset& coreset, const PointSet& P) {
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "coreset";
  j["seed"] = coreset.seed;
  j["plan"] = json{{"epsilon", coreset.plan.epsilon},
                   {"total_T", coreset.plan.total_T},
                   {"dim_estimate", coreset.plan.dim_estimate},
                   {"size_constant", coreset.plan.size_constant},
                   {"size_m", static_cast<std::int64_t>(coreset.plan.size_m)},
                   {"capped", coreset.plan.capped}};
  json idx = json::array();
  json ids = json::array();
  for (Eigen::Index i : coreset.indices) {
    idx.push_back(static_cast<std::int64_t>(i));
    ids.push_back(P.ids[static_cast<std::size_t>(i)]);
  }
  j["indices"] = idx;
  j["ids"] = ids;
  j["weights"] = vec_to_json(coreset.weights);
  return j;
}

Coreset coreset_from_json(const json& j) {
  Coreset c;
  c.seed = j.at("seed").get<std::uint64_t>();
  const auto& plan = j.at("plan");
  c.plan.epsilon = plan.at("epsilon").get<double>();
  c.plan.total_T = plan.at("total_T").get<double>();
  c.plan.dim_estimate = plan.at("dim_estimate").get<int>();
  c.plan.size_constant = plan.at("size_constant").get<double>();
  c.plan.size_m = plan.at("size_m").get<std::int64_t>();
  c.plan.capped = plan.at("capped").get<bool>();
  for (const auto& idx : j.at("indices")) c.indices.push_back(idx.get<std::int64_t>());
  c.weights = vec_from_json(j.at("weights"));
  return c;
}

json eval_report_to_json(const EvalReport& report) {
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "evaluation";
  j["max_rel_error"] = report.max_rel_error;
  j["quantiles"] = json{{"p50", report.q50}, {"p90", report.q90}, {"p99", report.q99}};
  j["by_source"] = json{{"random", report.max_random},
                        {"subset_fit", report.max_subset},
                        {"adversarial", report.max_adversarial}};
  j["shapes_evaluated"] = report.shapes_evaluated;
  return j;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << canonical_dump(j);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace senscore
