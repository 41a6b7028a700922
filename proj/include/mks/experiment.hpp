#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mks/ising.hpp"
#include "mks/lattice.hpp"

namespace mks {

/// Random nested domains around a random rectangular loop.
///
/// "rect": each level is the previous level's bounding box grown by a random
/// margin on every side, sometimes joined with a second overlapping rectangle.
/// "blob": each level adds `blob_growth` random frontier sites to the previous one.
struct GeneratorSpec {
  std::string family = "rect";
  std::size_t count = 0;
  int levels = 2;            // 2: pairs, 3: triples
  int loop_max_side = 2;     // cells per side of the loop's rectangle
  int margin_min = 0;
  int margin_max = 3;
  int blob_growth = 4;
  std::size_t max_sites = 400;
  int max_side = 20;         // bounding-box limit of the outermost domain
  bool allow_equal = false;  // permit consecutive equal domains
};

struct NestedTriple {
  DualLoop loop;
  std::vector<DiscreteDomain> domains;  // increasing, innermost first
  NestedConfig outer_pair() const;      // (loop, first, last)
};

/// Seed-reproducible; every output passes make_nested. Throws GenerationExhausted.
std::vector<NestedTriple> generate_triples(const GeneratorSpec& spec, std::uint64_t seed);
std::vector<NestedConfig> generate_configs(const GeneratorSpec& spec, std::uint64_t seed);

GeneratorSpec generator_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GeneratorSpec& g);

/// Serializable description of one sweep.
///
/// kind "nested": configs come from `generator` and/or `config_files`; every
/// config is evaluated for each quantity at every refinement level.
/// Quantities: ust_restriction, soup_mass, ising_restriction, ust_soup_sum,
/// cocycle_defect:<ust|soup|ising> (needs three domains).
/// kind "lerw": box dimension of `loops` LERW loops on the side x side annulus.
/// kind "harness": parameters only (in `generator` and `extra`); a sweep is empty.
struct ExperimentSpec {
  std::string name = "sweep";
  std::string kind = "nested";
  std::vector<std::string> quantities;
  double beta = kBetaCritical;
  IsingEngine engine = IsingEngine::Transfer;
  double c = 1.0;
  std::optional<GeneratorSpec> generator;
  std::vector<std::string> config_files;
  std::vector<int> refine{0};
  int side = 128;
  std::size_t loops = 30;
  std::vector<int> scales{2, 4, 8, 16};
  double tolerance = 1e-8;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  nlohmann::json extra = nlohmann::json::object();  // free-form parameters for harnesses
};

ExperimentSpec spec_from_json(const nlohmann::json& j);  // throws SpecParseError
nlohmann::json to_json(const ExperimentSpec& s);
/// FNV-1a 64 of the canonical JSON text, as 16 hex digits.
std::string spec_hash(const ExperimentSpec& s);

struct ResultRow {
  std::string spec_hash;
  std::string config_id;
  std::string quantity;
  double value = 0.0;
  std::optional<double> error_bound;
  std::string engine;
  int mesh_exponent = 0;
  std::string status = "ok";  // "ok" or "failed:<ErrorCode>"
};

nlohmann::json to_json(const ResultRow& r);
ResultRow row_from_json(const nlohmann::json& j);
std::string csv_header();
std::string to_csv(const ResultRow& r);

struct SweepResult {
  std::vector<ResultRow> rows;   // sorted by config id, then quantity order
  std::size_t computed = 0;      // work items evaluated in this run
  std::size_t resumed = 0;       // work items taken from the journal
};

/// Runs the sweep. With a journal path, completed work items are recorded
/// atomically as they finish and skipped on a rerun with the same spec hash.
/// Engine failures become failed rows; the sweep continues.
SweepResult run_sweep(const ExperimentSpec& spec, const std::optional<std::filesystem::path>& journal = {});

/// Work items of a nested sweep, in id order.
struct WorkItem {
  std::string id;
  NestedTriple triple;
  int refine = 0;
};
std::vector<WorkItem> sweep_items(const ExperimentSpec& spec);

/// Rows of one work item.
std::vector<ResultRow> evaluate_item(const ExperimentSpec& spec, const WorkItem& item, const std::string& hash);

}  // namespace mks
