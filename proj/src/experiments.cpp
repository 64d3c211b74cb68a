#include "senscore/experiments.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "senscore/coreset.hpp"
#include "senscore/errors.hpp"
#include "senscore/generators.hpp"
#include "senscore/io.hpp"
#include "senscore/numerics.hpp"
#include "senscore/sensitivity.hpp"

namespace senscore {

using nlohmann::json;

json experiment_config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "experiment_config";
  j["mode"] = cfg.mode;
  j["family"] = family_name(cfg.family);
  j["k"] = cfg.k;
  j["j"] = cfg.j;
  j["z"] = cfg.z;
  j["epsilon"] = cfg.epsilon;
  j["n"] = cfg.n;
  j["d"] = cfg.d;
  j["generator"] = json{{"kind", cfg.generator.kind},
                        {"components", cfg.generator.components},
                        {"separation", cfg.generator.separation},
                        {"spread", cfg.generator.spread},
                        {"imbalance", cfg.generator.imbalance},
                        {"noise", cfg.generator.noise},
                        {"int_exponent", cfg.generator.int_exponent}};
  j["seeds"] = cfg.seeds;
  j["sizes"] = cfg.sizes;
  j["dims"] = cfg.dims;
  j["ns"] = cfg.ns;
  j["budgets"] = json{{"fit_restarts", cfg.budgets.fit_restarts},
                      {"empirical", cfg.budgets.empirical},
                      {"eval_random", cfg.budgets.eval_random},
                      {"eval_subset", cfg.budgets.eval_subset},
                      {"eval_adversarial", cfg.budgets.eval_adversarial},
                      {"ascent_steps", cfg.budgets.ascent_steps}};
  j["threads"] = cfg.threads;
  j["output_table"] = cfg.output_table;
  return j;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.mode = j.value("mode", cfg.mode);
  if (cfg.mode != "sens_vs_uniform" && cfg.mode != "dim_sweep" && cfg.mode != "ts_growth") {
    throw InputError("unknown experiment mode: " + cfg.mode);
  }
  if (j.contains("family")) cfg.family = family_from_name(j["family"].get<std::string>());
  cfg.k = j.value("k", cfg.k);
  cfg.j = j.value("j", cfg.j);
  cfg.z = j.value("z", cfg.z);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.n = j.value("n", cfg.n);
  cfg.d = j.value("d", cfg.d);
  if (j.contains("generator")) {
    const auto& g = j["generator"];
    cfg.generator.kind = g.value("kind", cfg.generator.kind);
    cfg.generator.components = g.value("components", cfg.generator.components);
    cfg.generator.separation = g.value("separation", cfg.generator.separation);
    cfg.generator.spread = g.value("spread", cfg.generator.spread);
    cfg.generator.imbalance = g.value("imbalance", cfg.generator.imbalance);
    cfg.generator.noise = g.value("noise", cfg.generator.noise);
    cfg.generator.int_exponent = g.value("int_exponent", cfg.generator.int_exponent);
  }
  if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("sizes")) cfg.sizes = j["sizes"].get<std::vector<std::int64_t>>();
  if (j.contains("dims")) cfg.dims = j["dims"].get<std::vector<std::int64_t>>();
  if (j.contains("ns")) cfg.ns = j["ns"].get<std::vector<std::int64_t>>();
  if (j.contains("budgets")) {
    const auto& b = j["budgets"];
    cfg.budgets.fit_restarts = b.value("fit_restarts", cfg.budgets.fit_restarts);
    cfg.budgets.empirical = b.value("empirical", cfg.budgets.empirical);
    cfg.budgets.eval_random = b.value("eval_random", cfg.budgets.eval_random);
    cfg.budgets.eval_subset = b.value("eval_subset", cfg.budgets.eval_subset);
    cfg.budgets.eval_adversarial = b.value("eval_adversarial", cfg.budgets.eval_adversarial);
    cfg.budgets.ascent_steps = b.value("ascent_steps", cfg.budgets.ascent_steps);
  }
  cfg.threads = j.value("threads", cfg.threads);
  cfg.output_table = j.value("output_table", cfg.output_table);
  return cfg;
}

PointSet generate_instance(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto& g = cfg.generator;
  if (g.kind == "mixture") {
    MixtureSpec spec;
    spec.components = g.components;
    spec.separation = g.separation;
    spec.spread = g.spread;
    spec.imbalance = g.imbalance;
    return generate_mixture(cfg.n, cfg.d, spec, seed);
  }
  if (g.kind == "lines") return generate_near_lines(cfg.n, cfg.d, cfg.k, g.noise, seed);
  if (g.kind == "flat_noise") return generate_flat_noise(cfg.n, cfg.d, cfg.j, g.noise, seed);
  if (g.kind == "integer_grid") return generate_integer_grid(cfg.n, cfg.d, g.int_exponent, seed);
  if (g.kind == "lowerbound") return lowerbound_instance(static_cast<int>(cfg.n)).points;
  throw InputError("unknown generator kind: " + g.kind);
}

namespace {

SensitivityProfile profile_for(const ExperimentConfig& cfg, const PointSet& P, const DistanceConfig& dist,
                               std::uint64_t seed) {
  FitOptions fopts;
  fopts.restarts = cfg.budgets.fit_restarts;
  fopts.seed = seed;
  fopts.threads = cfg.threads;
  const FamilyParams params{cfg.k, cfg.j};
  switch (cfg.family) {
    case Family::KCenters:
      return sens_kcenters(P, fit_kcenters(P, cfg.k, dist, fopts), dist);
    case Family::JFlat:
      return sens_subspace(P, fit_jflat(P, cfg.j, dist, fopts), dist);
    case Family::KLines:
    case Family::KJFlats: {
      EmpiricalOptions eopts;
      eopts.budget = cfg.budgets.empirical;
      eopts.seed = seed;
      eopts.threads = cfg.threads;
      eopts.ascent_steps = cfg.budgets.ascent_steps;
      SensitivityProfile profile = sens_empirical(P, cfg.family, params, dist, eopts);
      return mix_floor(profile, P, 0.5);
    }
  }
  throw InputError("unknown family");
}

EvalOptions eval_options(const ExperimentConfig& cfg, std::uint64_t seed) {
  EvalOptions opts;
  opts.n_random = cfg.budgets.eval_random;
  opts.n_subset_fits = cfg.budgets.eval_subset;
  opts.n_adversarial = cfg.budgets.eval_adversarial;
  opts.ascent_steps = cfg.budgets.ascent_steps;
  opts.seed = seed;
  opts.threads = cfg.threads;
  return opts;
}

void run_sens_vs_uniform(const ExperimentConfig& cfg, std::ofstream& table) {
  const DistanceConfig dist(cfg.z, cfg.z < 1.0);
  const FamilyParams params{cfg.k, cfg.j};
  table << "seed,m,sens_max_err,uniform_max_err,sens_q90,uniform_q90\n";
  for (std::uint64_t seed : cfg.seeds) {
    const PointSet P = generate_instance(cfg, seed);
    const SensitivityProfile sens = profile_for(cfg, P, dist, seed);
    const SensitivityProfile unif = uniform_profile(P);
    for (std::int64_t m : cfg.sizes) {
      const Eigen::Index size = std::min<Eigen::Index>(m, P.size());
      const Coreset cs = draw(P, sens, size, derive_stream(seed, 1));
      const Coreset cu = draw(P, unif, size, derive_stream(seed, 2));
      const EvalReport rs = evaluate(P, cs.materialize(P), cfg.family, params, dist, eval_options(cfg, seed));
      const EvalReport ru = evaluate(P, cu.materialize(P), cfg.family, params, dist, eval_options(cfg, seed));
      table << seed << ',' << size << ',' << rs.max_rel_error << ',' << ru.max_rel_error << ',' << rs.q90 << ','
            << ru.q90 << '\n';
    }
  }
}

void run_dim_sweep(const ExperimentConfig& cfg, std::ofstream& table) {
  const DistanceConfig dist(cfg.z, cfg.z < 1.0);
  table << "seed,ambient_d,reduction_dim,unclamped_total,clamped_total\n";
  for (std::uint64_t seed : cfg.seeds) {
    const PointSet base = generate_instance(cfg, seed);
    for (std::int64_t dim : cfg.dims) {
      if (dim < base.dim()) continue;
      const PointSet P = embed_isometric(base, dim, seed);
      FitOptions fopts;
      fopts.restarts = cfg.budgets.fit_restarts;
      fopts.seed = seed;
      const SensitivityProfile profile = sens_subspace(P, fit_jflat(P, cfg.j, dist, fopts), dist);
      table << seed << ',' << dim << ',' << profile.reduction_dim << ',' << profile.unclamped_total << ','
            << profile.total << '\n';
    }
  }
}

void run_ts_growth(const ExperimentConfig& cfg, std::ofstream& table) {
  const DistanceConfig dist(cfg.z, cfg.z < 1.0);
  table << "instance,n,closed_form_total,empirical_total\n";
  for (std::int64_t n : cfg.ns) {
    // two-line adversarial family: closed form plus the estimator fed with
    // the adversarial shapes themselves
    const LowerBoundInstance lb = lowerbound_instance(static_cast<int>(n));
    const double closed = lowerbound_total(static_cast<int>(n));
    EmpiricalOptions eopts;
    eopts.budget = cfg.budgets.empirical;
    eopts.seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();
    eopts.ascent_steps = cfg.budgets.ascent_steps;
    eopts.extra_candidates = lb.shapes;
    const DistanceConfig euclid(1.0);
    const SensitivityProfile emp = sens_empirical(lb.points, Family::KLines, FamilyParams{2, 1}, euclid, eopts);
    table << "lowerbound," << n << ',' << closed << ',' << emp.total << '\n';

    ExperimentConfig grid_cfg = cfg;
    grid_cfg.n = n;
    grid_cfg.generator.kind = "integer_grid";
    const PointSet grid = generate_instance(grid_cfg, eopts.seed);
    EmpiricalOptions gopts = eopts;
    gopts.extra_candidates.clear();
    const SensitivityProfile gp = sens_empirical(grid, cfg.family, FamilyParams{cfg.k, cfg.j}, dist, gopts);
    table << "integer_grid," << n << ",," << gp.total << '\n';
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  ExperimentResult result;
  result.table_path = out_dir / cfg.output_table;
  result.manifest_path = out_dir / "manifest.json";

  std::ofstream table(result.table_path);
  if (!table) throw InputError("cannot write " + result.table_path.string());
  table.precision(17);

  if (cfg.mode == "sens_vs_uniform") {
    run_sens_vs_uniform(cfg, table);
  } else if (cfg.mode == "dim_sweep") {
    run_dim_sweep(cfg, table);
  } else if (cfg.mode == "ts_growth") {
    run_ts_growth(cfg, table);
  } else {
    throw InputError("unknown experiment mode: " + cfg.mode);
  }
  table.close();

  const json cfg_json = experiment_config_to_json(cfg);
  json manifest;
  manifest["schema"] = kSchemaVersion;
  manifest["kind"] = "experiment_manifest";
  manifest["config"] = cfg_json;
  manifest["config_hash"] = fnv1a_hex(canonical_dump(cfg_json));
  manifest["table"] = cfg.output_table;
  write_json(result.manifest_path, manifest);
  return result;
}

}  // namespace senscore
