#include "senscore/cli_app.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "senscore/coreset.hpp"
#include "senscore/errors.hpp"
#include "senscore/experiments.hpp"
#include "senscore/generators.hpp"
#include "senscore/io.hpp"
#include "senscore/sensitivity.hpp"

namespace senscore {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct CommonOpts {
  std::string input;
  bool weights_column = false;
  std::string family = "kcenters";
  int k = 1;
  int j = 1;
  double z = 2.0;
  bool experimental_z = false;
  std::uint64_t seed = 0;
  int threads = 1;
};

void add_family_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--family", opts.family, "shape family")
      ->check(CLI::IsMember({"kcenters", "klines", "jflat", "kjflats"}));
  cmd->add_option("-k,--k", opts.k, "number of constituents");
  cmd->add_option("-j,--j", opts.j, "flat dimension");
  cmd->add_option("--z", opts.z, "distance exponent");
  cmd->add_flag("--experimental-z", opts.experimental_z, "allow z in (0,1)");
  cmd->add_option("--seed", opts.seed, "RNG seed");
  cmd->add_option("--threads", opts.threads, "worker cap");
}

void add_input_flags(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--input", opts.input, "points CSV")->required();
  cmd->add_flag("--weights-column", opts.weights_column, "last CSV column is the point weight");
}

DistanceConfig distance_config(const CommonOpts& opts) { return DistanceConfig(opts.z, opts.experimental_z); }

FamilyParams family_params(const CommonOpts& opts) {
  FamilyParams p{opts.k, opts.j};
  if (opts.family == "kcenters") p.j = 0;
  if (opts.family == "klines") p.j = 1;
  if (opts.family == "jflat") p.k = 1;
  return p;
}

json provenance(const std::string& command, const json& effective, std::uint64_t seed) {
  json p;
  p["command"] = command;
  p["config_hash"] = fnv1a_hex(canonical_dump(effective));
  p["seed"] = seed;
  return p;
}

// Derives (family, k, j) from a stored shape for default dimension estimates.
void shape_params(const Shape& s, std::string& family, int& k, int& j) {
  k = static_cast<int>(s.constituent_count());
  j = static_cast<int>(s.flat_dim());
  if (std::holds_alternative<KPointSet>(s.value)) family = "kcenters";
  else if (std::holds_alternative<KLineSet>(s.value)) family = "klines";
  else if (std::holds_alternative<JFlat>(s.value)) family = "jflat";
  else family = "kjflats";
}

int cmd_fit(const CommonOpts& opts, double approx_factor, int restarts, const std::string& output) {
  const PointSet P = read_points_csv(opts.input, opts.weights_column);
  const DistanceConfig cfg = distance_config(opts);
  FitOptions fopts;
  fopts.restarts = restarts;
  fopts.seed = opts.seed;
  fopts.threads = opts.threads;
  fopts.approx_factor = approx_factor;
  const Family family = family_from_name(opts.family);
  const FitResult fit = fit_family(P, family, family_params(opts), cfg, fopts);

  json j = fit_to_json(fit, family, family_params(opts), cfg);
  const json effective{{"input", opts.input},   {"family", opts.family}, {"k", opts.k},
                       {"j", opts.j},           {"z", opts.z},           {"seed", opts.seed},
                       {"restarts", restarts},  {"approx_factor", approx_factor}};
  j["provenance"] = provenance("fit", effective, opts.seed);
  write_json(output, j);
  std::cout << "fit " << opts.family << " cost=" << fit.cost << " method=" << fit.method << " -> " << output
            << "\n";
  return 0;
}

int cmd_sensitivity(const CommonOpts& opts, const std::string& fit_path, double approx_factor, int restarts,
                    int budget, double floor_gamma, const std::string& output) {
  const PointSet P = read_points_csv(opts.input, opts.weights_column);
  const DistanceConfig cfg = distance_config(opts);
  const Family family = family_from_name(opts.family);

  SensitivityProfile profile;
  if (family == Family::KCenters || family == Family::JFlat) {
    FitResult fit;
    if (!fit_path.empty()) {
      const StoredFit stored = fit_from_json(read_json(fit_path));
      fit = stored.fit;
      fit.cost = cost(P, fit.shape, cfg);  // recompute against this instance
    } else {
      FitOptions fopts;
      fopts.restarts = restarts;
      fopts.seed = opts.seed;
      fopts.threads = opts.threads;
      fopts.approx_factor = approx_factor;
      fit = fit_family(P, family, family_params(opts), cfg, fopts);
    }
    profile = family == Family::KCenters ? sens_kcenters(P, fit, cfg) : sens_subspace(P, fit, cfg);
  } else {
    EmpiricalOptions eopts;
    eopts.budget = budget;
    eopts.seed = opts.seed;
    eopts.threads = opts.threads;
    profile = sens_empirical(P, family, family_params(opts), cfg, eopts);
    if (floor_gamma > 0.0) profile = mix_floor(profile, P, floor_gamma);
  }

  json j = profile_to_json(profile, P);
  const json effective{{"input", opts.input}, {"family", opts.family}, {"k", opts.k},       {"j", opts.j},
                       {"z", opts.z},         {"seed", opts.seed},     {"budget", budget},  {"fit", fit_path},
                       {"floor_gamma", floor_gamma}};
  j["provenance"] = provenance("sensitivity", effective, opts.seed);
  write_json(output, j);
  std::cout << "sensitivity " << profile.method << " total=" << profile.total << " -> " << output << "\n";
  return 0;
}

int cmd_coreset(const CommonOpts& opts, const std::string& profile_path, double epsilon, double size_constant,
                int dim_estimate, std::int64_t size_override, const std::string& output,
                const std::string& export_csv) {
  const PointSet P = read_points_csv(opts.input, opts.weights_column);
  const SensitivityProfile profile = profile_from_json(read_json(profile_path));
  if (profile.bounds.size() != P.size()) {
    throw InputError("profile was computed for a different instance size");
  }

  int dim = dim_estimate;
  if (dim <= 0) {
    // default (j+1)*d*k, taking j and k from the profile's fit when present
    int k = 1, j = 0;
    std::string fam;
    if (profile.fit.has_value()) shape_params(profile.fit->shape, fam, k, j);
    dim = (j + 1) * static_cast<int>(P.dim()) * k;
  }

  const CoresetPlan plan = plan_size(epsilon, profile, dim, size_constant, P.size());
  Coreset coreset;
  if (size_override > 0) {
    coreset = draw(P, profile, static_cast<Eigen::Index>(size_override), opts.seed);
    coreset.plan = plan;
    coreset.plan.size_m = size_override;
  } else {
    coreset = draw(P, profile, plan, opts.seed);
  }

  json j = coreset_to_json(coreset, P);
  const json effective{{"input", opts.input},       {"profile", profile_path},
                       {"epsilon", epsilon},        {"size_constant", size_constant},
                       {"dim_estimate", dim},       {"size_override", size_override},
                       {"seed", opts.seed}};
  j["provenance"] = provenance("coreset", effective, opts.seed);
  write_json(output, j);
  if (!export_csv.empty()) write_points_csv(export_csv, coreset.materialize(P), true);
  std::cout << "coreset m=" << coreset.indices.size() << " (planned " << plan.size_m
            << (plan.capped ? ", capped" : "") << ") -> " << output << "\n";
  return 0;
}

int cmd_evaluate(const CommonOpts& opts, const std::string& coreset_path, const std::string& coreset_csv,
                 int n_random, int n_subsets, int n_adversarial, int ascent_steps, const std::string& output) {
  const PointSet P = read_points_csv(opts.input, opts.weights_column);
  PointSet S = P;
  if (!coreset_path.empty()) {
    const Coreset coreset = coreset_from_json(read_json(coreset_path));
    S = coreset.materialize(P);
  } else if (!coreset_csv.empty()) {
    S = read_points_csv(coreset_csv, true);
  } else {
    throw InputError("evaluate needs --coreset or --coreset-csv");
  }

  const DistanceConfig cfg = distance_config(opts);
  EvalOptions eopts;
  eopts.n_random = n_random;
  eopts.n_subset_fits = n_subsets;
  eopts.n_adversarial = n_adversarial;
  eopts.ascent_steps = ascent_steps;
  eopts.seed = opts.seed;
  eopts.threads = opts.threads;
  const EvalReport report = evaluate(P, S, family_from_name(opts.family), family_params(opts), cfg, eopts);

  json j = eval_report_to_json(report);
  j["family"] = opts.family;
  j["k"] = opts.k;
  j["j"] = opts.j;
  j["z"] = opts.z;
  const json effective{{"input", opts.input},   {"coreset", coreset_path}, {"coreset_csv", coreset_csv},
                       {"family", opts.family}, {"k", opts.k},             {"j", opts.j},
                       {"z", opts.z},           {"seed", opts.seed},       {"n_random", n_random},
                       {"n_subsets", n_subsets}, {"n_adversarial", n_adversarial}};
  j["provenance"] = provenance("evaluate", effective, opts.seed);
  write_json(output, j);
  std::cout << "evaluate max_rel_error=" << report.max_rel_error << " q90=" << report.q90 << " -> " << output
            << "\n";
  return 0;
}

int cmd_lowerbound(int n, const std::string& out_dir) {
  const LowerBoundInstance inst = lowerbound_instance(n);
  const std::vector<double> ratios = lowerbound_ratio_table(n);

  fs::create_directories(out_dir);
  write_points_csv(fs::path(out_dir) / "instance.csv", inst.points, false);

  json shapes = json::array();
  for (const Shape& s : inst.shapes) shapes.push_back(shape_to_json(s));
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "lowerbound_shapes";
  j["n"] = n;
  j["shapes"] = shapes;
  write_json(fs::path(out_dir) / "shapes.json", j);

  std::ofstream table(fs::path(out_dir) / "ratios.csv");
  table.precision(17);
  table << "i,ratio,floor_1_over_2_plus_i,cumulative\n";
  double cum = 0.0;
  for (int i = 1; i <= n; ++i) {
    cum += ratios[static_cast<std::size_t>(i - 1)];
    table << i << ',' << ratios[static_cast<std::size_t>(i - 1)] << ',' << 1.0 / (2.0 + i) << ',' << cum << '\n';
  }
  table.close();

  double harmonic_floor = 0.0;
  for (int i = 1; i <= n; ++i) harmonic_floor += 1.0 / (2.0 + i);
  std::cout << "lowerbound n=" << n << " total=" << lowerbound_total(n) << " harmonic_floor=" << harmonic_floor
            << " -> " << out_dir << "\n";
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir) {
  const ExperimentConfig cfg = experiment_config_from_json(read_json(config_path));
  if (cfg.z < 1.0) throw InputError("experiment configs require z >= 1");
  const ExperimentResult result = run_experiment(cfg, out_dir);
  std::cout << "experiment " << cfg.mode << " -> " << result.table_path.string() << "\n";
  return 0;
}

int cmd_generate(const std::string& kind, std::int64_t n, std::int64_t d, int k, int j, int components,
                 double separation, double spread, double imbalance, double noise, double exponent,
                 std::uint64_t seed, const std::string& output) {
  ExperimentConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.k = k;
  cfg.j = j;
  cfg.generator.kind = kind;
  cfg.generator.components = components;
  cfg.generator.separation = separation;
  cfg.generator.spread = spread;
  cfg.generator.imbalance = imbalance;
  cfg.generator.noise = noise;
  cfg.generator.int_exponent = exponent;
  const PointSet P = generate_instance(cfg, seed);
  write_points_csv(output, P, false);
  std::cout << "generate " << kind << " n=" << P.size() << " d=" << P.dim() << " -> " << output << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"sensitivity-sampled coresets for projective clustering"};
  app.require_subcommand(1);

  CommonOpts opts;

  // fit
  auto* fit = app.add_subcommand("fit", "fit a shape to a point set");
  double approx_factor = 0.0;
  int restarts = 10;
  std::string output = "fit.json";
  add_input_flags(fit, opts);
  add_family_flags(fit, opts);
  fit->add_option("--approx-factor", approx_factor, "claimed approximation factor (0 = per-method default)");
  fit->add_option("--restarts", restarts, "independent restarts");
  fit->add_option("--output", output, "output JSON");

  // sensitivity
  auto* sens = app.add_subcommand("sensitivity", "per-point sensitivity bounds");
  std::string fit_path;
  int budget = 256;
  double floor_gamma = 0.5;
  std::string sens_output = "profile.json";
  add_input_flags(sens, opts);
  add_family_flags(sens, opts);
  sens->add_option("--fit", fit_path, "reuse a fit artifact");
  sens->add_option("--approx-factor", approx_factor, "claimed approximation factor for internal fits");
  sens->add_option("--restarts", restarts, "fit restarts when fitting internally");
  sens->add_option("--budget", budget, "candidate budget for the empirical estimator");
  sens->add_option("--floor-gamma", floor_gamma,
                   "uniform floor mixed into estimator profiles (0 disables, leaving them unusable for sampling)");
  sens->add_option("--output", sens_output, "output JSON");

  // coreset
  auto* core = app.add_subcommand("coreset", "draw a weighted coreset");
  std::string profile_path;
  double epsilon = 0.1;
  double size_constant = 1.0;
  int dim_estimate = 0;
  std::int64_t size_override = 0;
  std::string core_output = "coreset.json";
  std::string export_csv;
  add_input_flags(core, opts);
  core->add_option("--profile", profile_path, "sensitivity profile JSON")->required();
  core->add_option("--epsilon", epsilon, "target relative error");
  core->add_option("--size-constant", size_constant, "constant C in the size formula");
  core->add_option("--dim-estimate", dim_estimate, "dimension term (0 = (j+1)*d*k)");
  core->add_option("--size", size_override, "override the planned sample count");
  core->add_option("--seed", opts.seed, "RNG seed");
  core->add_option("--output", core_output, "output JSON");
  core->add_option("--export-csv", export_csv, "also write the weighted points as CSV");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "empirical coreset quality");
  std::string coreset_path, coreset_csv;
  int n_random = 64, n_subsets = 16, n_adversarial = 8, ascent_steps = 48;
  std::string eval_output = "report.json";
  add_input_flags(eval, opts);
  add_family_flags(eval, opts);
  eval->add_option("--coreset", coreset_path, "coreset JSON");
  eval->add_option("--coreset-csv", coreset_csv, "weighted points CSV (d columns + weight)");
  eval->add_option("--n-random", n_random, "random ensemble size");
  eval->add_option("--n-subsets", n_subsets, "subset-fitted ensemble size");
  eval->add_option("--n-adversarial", n_adversarial, "adversarial ensemble size");
  eval->add_option("--ascent-steps", ascent_steps, "hill-climb steps per adversarial shape");
  eval->add_option("--output", eval_output, "output JSON");

  // lowerbound
  auto* lower = app.add_subcommand("lowerbound", "log-growth two-line instance and its ratio table");
  int lb_n = 16;
  std::string lb_dir = "lowerbound_out";
  lower->add_option("-n,--n", lb_n, "number of points")->required();
  lower->add_option("--output-dir", lb_dir, "output directory");

  // experiment
  auto* exp = app.add_subcommand("experiment", "batch experiment from a JSON config");
  std::string config_path;
  std::string exp_dir = "experiment_out";
  exp->add_option("--config", config_path, "experiment config JSON")->required();
  exp->add_option("--output-dir", exp_dir, "output directory");

  // generate
  auto* gen = app.add_subcommand("generate", "synthetic instances");
  std::string gen_kind = "mixture";
  std::int64_t gen_n = 1000, gen_d = 2;
  int gen_components = 3;
  double gen_separation = 10.0, gen_spread = 1.0, gen_imbalance = 0.0, gen_noise = 0.5, gen_exponent = 1.0;
  std::string gen_output = "points.csv";
  gen->add_option("--kind", gen_kind, "mixture | lines | flat_noise | integer_grid | lowerbound")
      ->check(CLI::IsMember({"mixture", "lines", "flat_noise", "integer_grid", "lowerbound"}));
  gen->add_option("-n,--n", gen_n, "points");
  gen->add_option("-d,--d", gen_d, "dimension");
  gen->add_option("-k,--k", opts.k, "constituents (lines generator)");
  gen->add_option("-j,--j", opts.j, "flat dimension (flat_noise generator)");
  gen->add_option("--components", gen_components, "mixture components");
  gen->add_option("--separation", gen_separation, "mixture mean scale");
  gen->add_option("--spread", gen_spread, "within-component sigma");
  gen->add_option("--imbalance", gen_imbalance, "component size skew in [0,1]");
  gen->add_option("--noise", gen_noise, "generator noise sigma");
  gen->add_option("--exponent", gen_exponent, "integer grid magnitude exponent c");
  gen->add_option("--seed", opts.seed, "RNG seed");
  gen->add_option("--output", gen_output, "output CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fit->parsed()) return cmd_fit(opts, approx_factor, restarts, output);
    if (sens->parsed()) {
      return cmd_sensitivity(opts, fit_path, approx_factor, restarts, budget, floor_gamma, sens_output);
    }
    if (core->parsed()) {
      return cmd_coreset(opts, profile_path, epsilon, size_constant, dim_estimate, size_override, core_output,
                         export_csv);
    }
    if (eval->parsed()) {
      return cmd_evaluate(opts, coreset_path, coreset_csv, n_random, n_subsets, n_adversarial, ascent_steps,
                          eval_output);
    }
    if (lower->parsed()) return cmd_lowerbound(lb_n, lb_dir);
    if (exp->parsed()) return cmd_experiment(config_path, exp_dir);
    if (gen->parsed()) {
      return cmd_generate(gen_kind, gen_n, gen_d, opts.k, opts.j, gen_components, gen_separation, gen_spread,
                          gen_imbalance, gen_noise, gen_exponent, opts.seed, gen_output);
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const CapabilityError& e) {
    std::cerr << "capability error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace senscore
