// Command-line driver for the space-time solver experiments: inf-sup tables,
// convergence ladders, conditioning sweeps, and reference trajectories.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stpg/experiments.hpp"

namespace {

using nlohmann::json;

int exit_code_for(stpg::ErrorCategory c) {
  switch (c) {
    case stpg::ErrorCategory::InvalidArgument: return 2;
    case stpg::ErrorCategory::Domain: return 3;
    case stpg::ErrorCategory::Shape: return 4;
    case stpg::ErrorCategory::IncompleteBundle: return 5;
    case stpg::ErrorCategory::Factorization: return 6;
    case stpg::ErrorCategory::Definiteness: return 7;
    case stpg::ErrorCategory::Stability: return 8;
    case stpg::ErrorCategory::Io: return 9;
  }
  return 1;
}

void report_error(const stpg::Error& e) {
  json j{{"error", stpg::category_name(e.category())}, {"message", e.what()}};
  std::cerr << j.dump() << "\n";
}

stpg::ExperimentCase parse_case(const std::string& s) {
  if (s == "a") return stpg::ExperimentCase::smooth_a;
  if (s == "b") return stpg::ExperimentCase::sobolev_b;
  if (s == "c") return stpg::ExperimentCase::nonsmooth_c;
  throw stpg::Error(stpg::ErrorCategory::InvalidArgument, "unknown case: " + s);
}

stpg::LevelRelation parse_relation(const std::string& s) {
  if (s == "minus1") return stpg::LevelRelation::time_minus1;
  if (s == "equal") return stpg::LevelRelation::equal;
  if (s == "plus1") return stpg::LevelRelation::time_plus1;
  throw stpg::Error(stpg::ErrorCategory::InvalidArgument, "unknown relation: " + s);
}

void parse_levels(const std::string& s, int& lo, int& hi) {
  if (std::sscanf(s.c_str(), "%d:%d", &lo, &hi) == 2) return;
  if (std::sscanf(s.c_str(), "%d", &lo) == 1) {
    hi = lo;
    return;
  }
  throw stpg::Error(stpg::ErrorCategory::InvalidArgument, "bad --levels, want MIN:MAX: " + s);
}

void parse_orders(const std::string& s, int& ot, int& ox) {
  if (std::sscanf(s.c_str(), "%d,%d", &ot, &ox) == 2) return;
  throw stpg::Error(stpg::ErrorCategory::InvalidArgument, "bad --orders, want QT,QX: " + s);
}

void print_records(const std::vector<stpg::ExperimentRecord>& recs) {
  std::printf("%s\n", stpg::kCsvHeader);
  for (const auto& r : recs)
    std::printf("%d,%d,%ld,%.6e,%.6e,%.6e,%.6e,%.6e,%.1f\n", r.jspace, r.jtime, r.ndofs,
                r.l2error, r.l2diff, r.cond, r.beta, r.residual, r.wall_ms);
}

void write_records(const std::vector<stpg::ExperimentRecord>& recs, const std::string& out) {
  if (out.empty()) {
    print_records(recs);
  } else if (out.size() > 5 && out.substr(out.size() - 5) == ".json") {
    stpg::emit_json(recs, out);
  } else {
    stpg::emit_csv(recs, out);
  }
}

// Raw flag values (strings so that "not provided" is distinguishable); a JSON
// config file fills these first, command-line flags override.
struct Flags {
  std::string case_ = "a";
  std::string relation = "plus1";
  std::string levels = "1:5";
  std::string orders = "3,4";
  std::string variant = "ultraweak";
  std::string solver = "complex";
  std::string scheme = "cn";
  bool with_cond = false;
  bool with_beta = false;
  bool terminal_constraint = false;
  double dt = 1.0 / 16384.0;
  int ref_level = 11;
  int ref_order = 0;  // 0: per-case default
  std::string out;
  std::string cache_dir;
};

void apply_config_file(const std::string& path, Flags& f) {
  std::ifstream in(path);
  if (!in) throw stpg::Error(stpg::ErrorCategory::Io, "cannot read config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw stpg::Error(stpg::ErrorCategory::Io, std::string("bad config JSON: ") + e.what());
  }
  auto get = [&](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::decay_t<decltype(slot)>>();
  };
  get("case", f.case_);
  get("relation", f.relation);
  get("levels", f.levels);
  get("orders", f.orders);
  get("variant", f.variant);
  get("solver", f.solver);
  get("scheme", f.scheme);
  get("with_cond", f.with_cond);
  get("with_beta", f.with_beta);
  get("terminal_constraint", f.terminal_constraint);
  get("dt", f.dt);
  get("ref_level", f.ref_level);
  get("ref_order", f.ref_order);
  get("out", f.out);
  get("cache_dir", f.cache_dir);
}

stpg::ExperimentConfig to_config(const Flags& f) {
  stpg::ExperimentConfig cfg;
  cfg.which_case = parse_case(f.case_);
  cfg.relation = parse_relation(f.relation);
  parse_levels(f.levels, cfg.level_min, cfg.level_max);
  parse_orders(f.orders, cfg.order_t, cfg.order_x);
  if (f.variant == "ultraweak")
    cfg.variant = stpg::VariantKind::ultraweak;
  else if (f.variant == "galerkin")
    cfg.variant = stpg::VariantKind::galerkin;
  else
    throw stpg::Error(stpg::ErrorCategory::InvalidArgument, "unknown variant: " + f.variant);
  if (f.solver == "complex")
    cfg.solver = stpg::SolverKind::complex_lu;
  else if (f.solver == "block")
    cfg.solver = stpg::SolverKind::block_real;
  else
    throw stpg::Error(stpg::ErrorCategory::InvalidArgument, "unknown solver: " + f.solver);
  if (f.scheme == "cn")
    cfg.ref_scheme = stpg::Scheme::CrankNicolson;
  else if (f.scheme == "ie")
    cfg.ref_scheme = stpg::Scheme::ImplicitEuler;
  else
    throw stpg::Error(stpg::ErrorCategory::InvalidArgument, "unknown scheme: " + f.scheme);
  cfg.with_cond = f.with_cond;
  cfg.with_beta = f.with_beta;
  cfg.galerkin_terminal_constraint = f.terminal_constraint;
  cfg.out = f.out;
  cfg.cache_dir = f.cache_dir;
  return cfg;
}

void add_common_flags(CLI::App* cmd, Flags& f, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON file with option defaults");
  cmd->add_option("--case", f.case_, "initial datum: a (smooth), b (kink), c (step)");
  cmd->add_option("--relation", f.relation, "time level vs space level: minus1|equal|plus1");
  cmd->add_option("--levels", f.levels, "space level range MIN:MAX");
  cmd->add_option("--orders", f.orders, "spline orders QT,QX");
  cmd->add_option("--variant", f.variant, "ultraweak|galerkin");
  cmd->add_option("--solver", f.solver, "complex|block");
  cmd->add_option("--scheme", f.scheme, "reference stepper: cn|ie");
  cmd->add_flag("--with-cond", f.with_cond, "also record condition numbers");
  cmd->add_flag("--with-beta", f.with_beta, "also record inf-sup constants");
  cmd->add_flag("--terminal-constraint", f.terminal_constraint,
                "constrain the Galerkin trial space at the final time");
  cmd->add_option("--out", f.out, "output path (.csv or .json; default: stdout)");
  cmd->add_option("--cache-dir", f.cache_dir, "directory for cached reference trajectories");
}

int run(int argc, char** argv) {
  CLI::App app{"space-time Petrov-Galerkin experiments for the free Schroedinger equation"};
  app.require_subcommand(1);

  Flags f;
  std::string config_path;

  CLI::App* table1 = app.add_subcommand("table1", "inf-sup constants on the standard ladder");
  table1->add_option("--out", f.out, "output path");

  CLI::App* converge = app.add_subcommand("converge", "convergence ladder for one case");
  add_common_flags(converge, f, config_path);

  CLI::App* condition = app.add_subcommand("condition", "condition numbers along a ladder");
  add_common_flags(condition, f, config_path);

  CLI::App* infsup = app.add_subcommand("infsup", "inf-sup constants along a ladder");
  add_common_flags(infsup, f, config_path);

  CLI::App* galerkin = app.add_subcommand("galerkin", "Galerkin-on-test-space ladder");
  add_common_flags(galerkin, f, config_path);

  CLI::App* reference = app.add_subcommand("reference", "run one reference trajectory");
  reference->add_option("--config", config_path, "JSON file with option defaults");
  reference->add_option("--case", f.case_, "initial datum: a|b|c");
  reference->add_option("--scheme", f.scheme, "cn|ie");
  reference->add_option("--dt", f.dt, "time step");
  reference->add_option("--level", f.ref_level, "spatial refinement level");
  reference->add_option("--order", f.ref_order, "spatial spline order (0: per-case default)");
  reference->add_option("--out", f.out, "trajectory CSV path");
  reference->add_option("--cache-dir", f.cache_dir, "directory for cached trajectories");

  // The config file only provides defaults, so apply it before reading the
  // remaining flags: CLI11 assigns bound variables only for flags present.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") apply_config_file(argv[i + 1], f);

  CLI11_PARSE(app, argc, argv);

  if (table1->parsed()) {
    write_records(stpg::run_table1(), f.out);
    return 0;
  }
  if (converge->parsed()) {
    write_records(stpg::run_convergence(to_config(f)), f.out);
    return 0;
  }
  if (galerkin->parsed()) {
    stpg::ExperimentConfig cfg = to_config(f);
    cfg.variant = stpg::VariantKind::galerkin;
    write_records(stpg::run_convergence(cfg), f.out);
    return 0;
  }
  if (condition->parsed() || infsup->parsed()) {
    stpg::ExperimentConfig cfg = to_config(f);
    const stpg::QuadratureRule1D rule = stpg::default_rule(cfg.order_t, cfg.order_x);
    std::vector<stpg::ExperimentRecord> recs;
    for (int js = cfg.level_min; js <= cfg.level_max; ++js) {
      const auto t0 = std::chrono::steady_clock::now();
      const int jt = stpg::jtime_for(cfg.relation, js);
      const auto tspace = stpg::make_temporal_space(jt, cfg.order_t, 1.0);
      const auto xspace = stpg::make_spatial_space(js, cfg.order_x, 1.0);
      const auto bundle = stpg::assemble_bundle(tspace, xspace, cfg.pot, rule);
      const auto sys = stpg::assemble_optimal_system(bundle, cfg.pot);
      stpg::ExperimentRecord r;
      r.jspace = js;
      r.jtime = jt;
      r.ndofs = static_cast<long>(tspace.dim) * xspace.dim;
      if (condition->parsed() || cfg.with_cond) r.cond = stpg::condition_number(sys.S);
      if (infsup->parsed() || cfg.with_beta) r.beta = stpg::infsup_constant(sys.S, sys.S, sys.S);
      r.wall_ms = stpg::detail::wall_ms_since(t0);
      recs.push_back(r);
    }
    write_records(recs, f.out);
    return 0;
  }
  if (reference->parsed()) {
    const auto cd = stpg::detail::case_data(parse_case(f.case_));
    stpg::TimeStepperConfig rc;
    rc.scheme = f.scheme == "ie" ? stpg::Scheme::ImplicitEuler : stpg::Scheme::CrankNicolson;
    rc.dt = f.dt;
    const int order = f.ref_order > 0 ? f.ref_order : cd.ref_order;
    rc.space = stpg::make_spline_space(stpg::Mesh1D::dyadic(0.0, 1.0, f.ref_level), order,
                                       stpg::Constraint::ZeroBothEnds);
    rc.report_progress = true;
    const stpg::ReferenceSolution ref = stpg::cached_timestepper(rc, cd.u0, cd.splits, f.cache_dir);
    if (!f.out.empty()) stpg::save_reference(ref, f.out);
    std::printf("snapshots=%td dim=%td drift=%.3e monotone=%d\n",
                static_cast<std::ptrdiff_t>(ref.times.size()),
                static_cast<std::ptrdiff_t>(ref.states.rows()), ref.max_norm_drift,
                ref.norm_monotone ? 1 : 0);
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const stpg::Error& e) {
    report_error(e);
    return exit_code_for(e.category());
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
}
