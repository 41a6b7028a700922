#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mks/cocycle.hpp"
#include "mks/experiment.hpp"
#include "mks/io.hpp"
#include "mks/loopsoup.hpp"

using namespace mks;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitEngine = 2;
constexpr int kExitAssert = 3;

struct Globals {
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  std::string out;
  double tol = 1e-8;
};

// --out wins; otherwise MKS_OUT_DIR/<fallback>; otherwise nothing.
std::string output_path(const Globals& g, const std::string& fallback) {
  if (!g.out.empty()) return g.out;
  if (const char* dir = std::getenv("MKS_OUT_DIR"); dir && *dir && !fallback.empty())
    return (std::filesystem::path(dir) / fallback).string();
  return {};
}

void ensure_parent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

InverseTemperature parse_beta(const std::string& text) {
  if (text == "critical" || text == "c") return InverseTemperature::critical();
  try {
    return InverseTemperature(std::stod(text));
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::InvalidArgument, "beta must be 'critical' or a number");
  }
}

// one quantity of one config: JSON on stdout, one-row CSV in --out
void emit_quantity(const Globals& g, const std::string& config_path, const std::string& quantity, double value,
                   const std::string& engine, int mesh, double seconds, json extra = json::object()) {
  json j = {{"quantity", quantity}, {"value", value}, {"engine", engine}, {"mesh_exponent", mesh},
            {"timings", {{"wall_seconds", seconds}}}};
  j.update(extra);
  std::cout << j.dump(1) << "\n";
  const std::string path = output_path(g, quantity + ".csv");
  if (path.empty()) return;
  ResultRow r{"single", std::filesystem::path(config_path).stem().string(), quantity, value, {}, engine, mesh, "ok"};
  ensure_parent(path);
  io::write_text_file_atomic(path, csv_header() + "\n" + to_csv(r) + "\n");
}

void emit_json(const Globals& g, const json& j, const std::string& fallback) {
  std::cout << j.dump(1) << "\n";
  const std::string path = output_path(g, fallback);
  if (path.empty()) return;
  ensure_parent(path);
  io::write_text_file_atomic(path, io::dump(j));
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for loop-measure restriction functions"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "worker threads")->capture_default_str();
  app.add_option("--out", g.out, "output file or directory (default: $MKS_OUT_DIR)");
  app.add_option("--tol", g.tol, "tolerance for checks")->capture_default_str();
  app.fallthrough();

  int exit_code = 0;
  std::string config_path, engine_name = "transfer", beta_text = "critical";

  auto* ising = app.add_subcommand("ising-restriction", "log Z ratio of the Ising model with + boundary");
  ising->add_option("--config", config_path, "nested config JSON")->required()->check(CLI::ExistingFile);
  ising->add_option("--engine", engine_name, "enum | transfer | kacward")->capture_default_str();
  ising->add_option("--beta", beta_text, "'critical' or a value")->capture_default_str();
  ising->callback([&] {
    const auto t0 = std::chrono::steady_clock::now();
    const NestedConfig cfg = io::config_from_json(io::read_json_file(config_path));
    const IsingEngine engine = parse_engine(engine_name);
    const InverseTemperature beta = parse_beta(beta_text);
    const double f = ising_restriction(cfg, beta, engine);
    emit_quantity(g, config_path, "ising_restriction", f, to_string(engine), cfg.outer.mesh_exponent(),
                  seconds_since(t0), {{"f", f}, {"beta", beta.value()}});
  });

  auto* ust = app.add_subcommand("ust-restriction", "spanning-tree restriction function");
  ust->add_option("--config", config_path, "nested config JSON")->required()->check(CLI::ExistingFile);
  ust->callback([&] {
    const auto t0 = std::chrono::steady_clock::now();
    const NestedConfig cfg = io::config_from_json(io::read_json_file(config_path));
    emit_quantity(g, config_path, "ust_restriction", ust_restriction(cfg), "logdet", cfg.outer.mesh_exponent(),
                  seconds_since(t0));
  });

  auto* soup = app.add_subcommand("soup-mass", "random-walk loop mass hitting the loop and the collar");
  soup->add_option("--config", config_path, "nested config JSON")->required()->check(CLI::ExistingFile);
  soup->callback([&] {
    const auto t0 = std::chrono::steady_clock::now();
    const NestedConfig cfg = io::config_from_json(io::read_json_file(config_path));
    emit_quantity(g, config_path, "soup_mass", soup_mass(cfg), "logdet", cfg.outer.mesh_exponent(), seconds_since(t0));
  });

  std::string evaluator_name = "ust", triples_path;
  double c_value = 1.0;
  bool assert_mode = false;
  auto* cocycle = app.add_subcommand("cocycle-check", "cocycle defect on nested triples");
  cocycle->add_option("--evaluator", evaluator_name, "ust | soup | ising")->capture_default_str();
  cocycle->add_option("--triples", triples_path, "JSON list of {loop, domains: [d1, d2, d3]}")
      ->required()
      ->check(CLI::ExistingFile);
  cocycle->add_option("--engine", engine_name, "Ising engine")->capture_default_str();
  cocycle->add_option("--beta", beta_text, "Ising beta")->capture_default_str();
  cocycle->add_option("--c", c_value, "soup prefactor")->capture_default_str();
  cocycle->add_flag("--assert", assert_mode, "exit 3 when a defect exceeds --tol");
  cocycle->callback([&] {
    RestrictionEvaluator f;
    if (evaluator_name == "ust") f = ust_evaluator();
    else if (evaluator_name == "soup") f = soup_evaluator(c_value);
    else if (evaluator_name == "ising") f = ising_evaluator(parse_beta(beta_text), parse_engine(engine_name));
    else throw CLI::ValidationError("--evaluator", "unknown evaluator " + evaluator_name);
    json list = io::read_json_file(triples_path);
    if (!list.is_array()) list = json::array({list});
    std::string report;
    bool all_pass = true;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const auto& t = list[k];
      std::vector<DiscreteDomain> d;
      for (const auto& e : t.at("domains")) d.push_back(io::domain_from_json(e));
      if (d.size() != 3) throw Error(ErrorCode::SpecParseError, "a triple needs three domains");
      const CocycleReport r = check_cocycle(f, io::loop_from_json(t.at("loop")), d[0], d[1], d[2], g.tol);
      all_pass = all_pass && r.pass;
      report += json{{"triple", k},     {"evaluator", r.evaluator}, {"f13", r.f13},     {"f12", r.f12},
                     {"f23", r.f23},    {"defect", r.defect},       {"tolerance", r.tolerance}, {"pass", r.pass}}
                    .dump() +
                "\n";
    }
    std::cout << report;
    if (const std::string path = output_path(g, "cocycle.jsonl"); !path.empty()) {
      ensure_parent(path);
      io::write_text_file_atomic(path, report);
    }
    if (assert_mode && !all_pass) exit_code = kExitAssert;
  });

  std::string map_text;
  double eps = 1e-6, theta = 0.0, beta_shift = 0.0;
  int q_max = 0;
  auto* rot = app.add_subcommand("rotation-number", "rotation number of a circle map");
  rot->add_option("--map", map_text, "rotation:a | mobius:theta,re[,im] | trig:a0,a1,b1,... | file.json")->required();
  rot->add_option("--eps", eps, "target error")->capture_default_str();
  rot->add_option("--qmax", q_max, "also search for a rational certificate up to this period");
  rot->callback([&] {
    const RotationResult r = rotation_number(io::parse_map(map_text), eps, {100'000'000, q_max});
    json j = {{"value", r.value},
              {"translation", r.translation},
              {"error_bound", r.error_bound},
              {"iterations", r.iterations}};
    j["certificate"] = r.certificate ? json::array({r.certificate->first, r.certificate->second}) : json(nullptr);
    emit_json(g, j, "rotation_number.json");
  });

  auto* alpha = app.add_subcommand("solve-alpha", "rotation alpha with r(R_alpha o f) = theta");
  alpha->add_option("--map", map_text, "circle map spec")->required();
  alpha->add_option("--theta", theta, "target rotation number")->required();
  alpha->add_option("--eps", eps, "target error")->capture_default_str();
  alpha->callback([&] {
    const AlphaSolution s = solve_alpha(io::parse_map(map_text), theta, eps);
    emit_json(g,
              {{"alpha", s.alpha}, {"rotation", s.rotation}, {"error_bound", s.error_bound},
               {"evaluations", s.evaluations}},
              "solve_alpha.json");
  });

  auto* comm = app.add_subcommand("commutator-check", "check f = R_-a (h^-1 R_t h R_t^-1) R_t on a grid");
  comm->set_help_flag("--help", "Print this help message and exit");
  comm->add_option("--h", map_text, "circle map spec for h")->required();
  comm->add_option("--theta", theta, "rotation theta")->required();
  comm->add_option("--beta", beta_shift, "shift beta in f_beta")->capture_default_str();
  comm->add_option("--eps", eps, "solve_alpha accuracy")->capture_default_str();
  comm->add_flag("--assert", assert_mode, "exit 3 when the defect exceeds --tol");
  comm->callback([&] {
    const CommutatorReport r = commutator_decomposition_check(io::parse_map(map_text), theta, beta_shift, eps);
    emit_json(g,
              {{"sup_defect", r.sup_defect}, {"alpha", r.alpha}, {"alpha_error", r.alpha_error},
               {"grid_points", r.grid_points}},
              "commutator.json");
    if (assert_mode && !(r.sup_defect <= g.tol && r.alpha_error <= eps)) exit_code = kExitAssert;
  });

  int side = 128;
  std::size_t loops = 30;
  std::vector<int> scales{2, 4, 8, 16, 32};
  auto* lerw = app.add_subcommand("lerw-dimension", "box dimension of LERW loops in a square annulus");
  lerw->add_option("--side", side, "domain side")->capture_default_str();
  lerw->add_option("--loops", loops, "number of loops")->capture_default_str();
  lerw->add_option("--scales", scales, "box sides")->capture_default_str();
  lerw->callback([&] {
    ExperimentSpec spec;
    spec.name = "lerw-dimension";
    spec.kind = "lerw";
    spec.side = side;
    spec.loops = loops;
    spec.scales = scales;
    spec.seed = g.seed;
    spec.jobs = g.jobs;
    const SweepResult res = run_sweep(spec);
    std::string csv = csv_header() + "\n";
    for (const auto& r : res.rows) csv += to_csv(r) + "\n";
    const ResultRow& dim = res.rows.back();
    std::cout << json{{"dimension", dim.value}, {"standard_error", dim.error_bound.value_or(0.0)},
                      {"loops", loops}, {"side", side}}
                     .dump(1)
              << "\n";
    if (const std::string path = output_path(g, "lerw_dimension.csv"); !path.empty()) {
      ensure_parent(path);
      io::write_text_file_atomic(path, csv);
    }
    if (dim.status != "ok") exit_code = kExitEngine;
  });

  std::string spec_path;
  auto* sweep = app.add_subcommand("sweep", "run an experiment spec; resumable through its journal");
  sweep->add_option("spec", spec_path, "experiment spec JSON")->required()->check(CLI::ExistingFile);
  sweep->add_flag("--assert", assert_mode, "exit 3 on failed rows or identity defects above the tolerance");
  sweep->callback([&] {
    ExperimentSpec spec = spec_from_json(io::read_json_file(spec_path));
    if (app.count("--jobs")) spec.jobs = g.jobs;
    std::filesystem::path dir = output_path(g, ".");
    if (dir.empty()) dir = "results";
    std::filesystem::create_directories(dir);
    const SweepResult res = run_sweep(spec, dir / (spec.name + ".journal.json"));
    std::string csv = csv_header() + "\n";
    bool ok = true;
    for (const auto& r : res.rows) {
      csv += to_csv(r) + "\n";
      if (r.status != "ok") ok = false;
      const bool identity = r.quantity == "ust_soup_sum" || r.quantity.rfind("cocycle_defect:", 0) == 0;
      if (identity && r.status == "ok" && !(std::abs(r.value) <= spec.tolerance)) ok = false;
    }
    io::write_text_file_atomic(dir / (spec.name + ".csv"), csv);
    std::cout << json{{"spec_hash", spec_hash(spec)}, {"rows", res.rows.size()}, {"computed", res.computed},
                      {"resumed", res.resumed}, {"csv", (dir / (spec.name + ".csv")).string()}}
                     .dump(1)
              << "\n";
    if (assert_mode && !ok) exit_code = kExitAssert;
  });

  GeneratorSpec gen;
  auto* generate = app.add_subcommand("generate", "write random nested configurations as JSON files");
  generate->add_option("--family", gen.family, "rect | blob")->capture_default_str();
  generate->add_option("--count", gen.count, "number of configs")->capture_default_str();
  generate->add_option("--levels", gen.levels, "2 for pairs, 3 for triples")->capture_default_str();
  generate->add_option("--max-side", gen.max_side, "bounding box limit")->capture_default_str();
  generate->add_option("--max-sites", gen.max_sites, "site limit")->capture_default_str();
  generate->callback([&] {
    std::filesystem::path dir = output_path(g, "configs");
    if (dir.empty()) dir = "configs";
    std::filesystem::create_directories(dir);
    const auto triples = generate_triples(gen, g.seed);
    json all = json::array();
    for (std::size_t k = 0; k < triples.size(); ++k) {
      const auto& t = triples[k];
      json j;
      if (gen.levels == 2) {
        j = io::to_json(t.outer_pair());
      } else {
        j = {{"loop", io::to_json(t.loop)}, {"domains", json::array()}};
        for (const auto& d : t.domains) j["domains"].push_back(io::to_json(d));
      }
      char name[32];
      std::snprintf(name, sizeof name, "g%05zu.json", k);
      io::write_text_file_atomic(dir / name, io::dump(j));
      all.push_back(std::move(j));
    }
    io::write_text_file_atomic(dir / "all.json", io::dump(all));
    std::cout << json{{"count", triples.size()}, {"dir", dir.string()}}.dump() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::SpecParseError || e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitEngine;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEngine;
  }
  return exit_code;
}
