#include "mks/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "mks/cocycle.hpp"
#include "mks/io.hpp"
#include "mks/loopsoup.hpp"
#include "mks/random.hpp"

namespace mks {

using nlohmann::json;

NestedConfig NestedTriple::outer_pair() const { return make_nested(loop, domains.front(), domains.back()); }

namespace {

struct Rect {
  int x0, y0, x1, y1;
};

void add_rect(std::set<Site>& out, const Rect& r) {
  for (int x = r.x0; x <= r.x1; ++x)
    for (int y = r.y0; y <= r.y1; ++y) out.insert({x, y});
}

Rect bbox(const std::set<Site>& s) {
  Rect r{s.begin()->x, s.begin()->y, s.begin()->x, s.begin()->y};
  for (Site p : s) r = {std::min(r.x0, p.x), std::min(r.y0, p.y), std::max(r.x1, p.x), std::max(r.y1, p.y)};
  return r;
}

void grow_rect(std::set<Site>& cur, const GeneratorSpec& g, std::mt19937_64& rng) {
  const Rect b = bbox(cur);
  const Rect r{b.x0 - uniform_int(rng, g.margin_min, g.margin_max), b.y0 - uniform_int(rng, g.margin_min, g.margin_max),
               b.x1 + uniform_int(rng, g.margin_min, g.margin_max), b.y1 + uniform_int(rng, g.margin_min, g.margin_max)};
  add_rect(cur, r);
  if (uniform_index(rng, 2) == 0) {
    // second rectangle overlapping the first
    const int m = g.margin_max + 2;
    int ax = uniform_int(rng, r.x0 - m, r.x1 + m), bx = uniform_int(rng, r.x0 - m, r.x1 + m);
    int ay = uniform_int(rng, r.y0 - m, r.y1 + m), by = uniform_int(rng, r.y0 - m, r.y1 + m);
    const Rect e{std::min(ax, bx), std::min(ay, by), std::max(ax, bx), std::max(ay, by)};
    if (e.x1 >= r.x0 && e.x0 <= r.x1 && e.y1 >= r.y0 && e.y0 <= r.y1) add_rect(cur, e);
  }
}

void grow_blob(std::set<Site>& cur, int count, std::mt19937_64& rng) {
  for (int k = 0; k < count; ++k) {
    std::vector<Site> frontier;
    for (Site s : cur)
      for (Site d : kNeighborOffsets)
        if (!cur.count(s + d)) frontier.push_back(s + d);
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()), frontier.end());
    cur.insert(frontier[uniform_index(rng, frontier.size())]);
  }
}

std::optional<NestedTriple> try_generate(const GeneratorSpec& g, std::mt19937_64& rng) {
  const int w = uniform_int(rng, 1, g.loop_max_side), h = uniform_int(rng, 1, g.loop_max_side);
  std::vector<Site> cells;
  for (int x = 0; x < w; ++x)
    for (int y = 0; y < h; ++y) cells.push_back({x, y});

  NestedTriple t;
  t.loop = boundary_loop(cells);
  std::set<Site> cur;
  add_rect(cur, {-1, -1, w, h});
  for (int level = 0; level < g.levels; ++level) {
    const std::size_t before = level == 0 ? 0 : cur.size();
    if (g.family == "rect") grow_rect(cur, g, rng);
    else if (g.family == "blob") grow_blob(cur, g.blob_growth, rng);
    else throw Error(ErrorCode::SpecParseError, "unknown generator family '" + g.family + "'");
    if (level > 0 && !g.allow_equal && cur.size() == before) return std::nullopt;
    t.domains.push_back(validate_domain({cur.begin(), cur.end()}));
  }
  const Rect b = bbox(cur);
  if (cur.size() > g.max_sites || b.x1 - b.x0 + 1 > g.max_side || b.y1 - b.y0 + 1 > g.max_side) return std::nullopt;
  make_nested(t.loop, t.domains.front(), t.domains.back());
  return t;
}

}  // namespace

std::vector<NestedTriple> generate_triples(const GeneratorSpec& spec, std::uint64_t seed) {
  if (spec.levels < 2) throw Error(ErrorCode::InvalidArgument, "generator needs at least two levels");
  if (spec.loop_max_side < 1 || spec.margin_min < 0 || spec.margin_max < spec.margin_min)
    throw Error(ErrorCode::InvalidArgument, "bad generator ranges");
  std::mt19937_64 rng(seed);
  std::vector<NestedTriple> out;
  out.reserve(spec.count);
  for (std::size_t k = 0; k < spec.count; ++k) {
    std::optional<NestedTriple> t;
    for (int attempt = 0; attempt < 1000 && !t; ++attempt) t = try_generate(spec, rng);
    if (!t) throw Error(ErrorCode::GenerationExhausted, "no valid configuration after 1000 attempts");
    out.push_back(std::move(*t));
  }
  return out;
}

std::vector<NestedConfig> generate_configs(const GeneratorSpec& spec, std::uint64_t seed) {
  std::vector<NestedConfig> out;
  for (const NestedTriple& t : generate_triples(spec, seed)) out.push_back(t.outer_pair());
  return out;
}

GeneratorSpec generator_from_json(const json& j) {
  GeneratorSpec g;
  g.family = j.value("family", g.family);
  g.count = j.value("count", g.count);
  g.levels = j.value("levels", g.levels);
  g.loop_max_side = j.value("loop_max_side", g.loop_max_side);
  g.margin_min = j.value("margin_min", g.margin_min);
  g.margin_max = j.value("margin_max", g.margin_max);
  g.blob_growth = j.value("blob_growth", g.blob_growth);
  g.max_sites = j.value("max_sites", g.max_sites);
  g.max_side = j.value("max_side", g.max_side);
  g.allow_equal = j.value("allow_equal", g.allow_equal);
  return g;
}

json to_json(const GeneratorSpec& g) {
  return {{"family", g.family},         {"count", g.count},           {"levels", g.levels},
          {"loop_max_side", g.loop_max_side}, {"margin_min", g.margin_min}, {"margin_max", g.margin_max},
          {"blob_growth", g.blob_growth}, {"max_sites", g.max_sites},   {"max_side", g.max_side},
          {"allow_equal", g.allow_equal}};
}

ExperimentSpec spec_from_json(const json& j) {
  try {
    ExperimentSpec s;
    s.name = j.value("name", s.name);
    s.kind = j.value("kind", s.kind);
    if (s.kind != "nested" && s.kind != "lerw" && s.kind != "harness") throw Error(ErrorCode::SpecParseError, "unknown kind '" + s.kind + "'");
    s.quantities = j.value("quantities", s.quantities);
    s.beta = j.value("beta", s.beta);
    s.engine = parse_engine(j.value("engine", std::string("transfer")));
    s.c = j.value("c", s.c);
    if (j.contains("generator")) s.generator = generator_from_json(j.at("generator"));
    s.config_files = j.value("config_files", s.config_files);
    s.refine = j.value("refine", s.refine);
    s.side = j.value("side", s.side);
    s.loops = j.value("loops", s.loops);
    s.scales = j.value("scales", s.scales);
    s.tolerance = j.value("tolerance", s.tolerance);
    s.seed = j.value("seed", s.seed);
    s.jobs = j.value("jobs", s.jobs);
    s.extra = j.value("extra", s.extra);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SpecParseError, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::SpecParseError, e.what());
    throw;
  }
}

json to_json(const ExperimentSpec& s) {
  json j = {{"name", s.name},         {"kind", s.kind},     {"quantities", s.quantities},
            {"beta", s.beta},         {"engine", to_string(s.engine)}, {"c", s.c},
            {"config_files", s.config_files}, {"refine", s.refine}, {"side", s.side},
            {"loops", s.loops},       {"scales", s.scales}, {"tolerance", s.tolerance},
            {"seed", s.seed},         {"extra", s.extra}};
  if (s.generator) j["generator"] = to_json(*s.generator);
  return j;  // jobs is left out: it does not change results
}

std::string spec_hash(const ExperimentSpec& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : to_json(s).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

json to_json(const ResultRow& r) {
  json j = {{"spec_hash", r.spec_hash}, {"config_id", r.config_id}, {"quantity", r.quantity},
            {"value", r.value},         {"engine", r.engine},       {"mesh_exponent", r.mesh_exponent},
            {"status", r.status}};
  j["error_bound"] = r.error_bound ? json(*r.error_bound) : json(nullptr);
  return j;
}

ResultRow row_from_json(const json& j) {
  ResultRow r;
  r.spec_hash = j.at("spec_hash").get<std::string>();
  r.config_id = j.at("config_id").get<std::string>();
  r.quantity = j.at("quantity").get<std::string>();
  r.value = j.at("value").is_number() ? j.at("value").get<double>() : 0.0;
  if (j.contains("error_bound") && j.at("error_bound").is_number()) r.error_bound = j.at("error_bound").get<double>();
  r.engine = j.at("engine").get<std::string>();
  r.mesh_exponent = j.at("mesh_exponent").get<int>();
  r.status = j.at("status").get<std::string>();
  return r;
}

std::string csv_header() { return "spec_hash,config_id,quantity,value,error_bound,engine,mesh_exponent,status"; }

std::string to_csv(const ResultRow& r) {
  char value[64] = "", bound[64] = "";
  if (r.status == "ok") *std::to_chars(value, value + sizeof value - 1, r.value).ptr = '\0';
  if (r.error_bound) *std::to_chars(bound, bound + sizeof bound - 1, *r.error_bound).ptr = '\0';
  std::ostringstream out;
  out << r.spec_hash << ',' << r.config_id << ',' << r.quantity << ',' << value << ',' << bound << ',' << r.engine
      << ',' << r.mesh_exponent << ',' << r.status;
  return out.str();
}

namespace {

NestedTriple triple_from_json(const json& j) {
  NestedTriple t;
  try {
    if (j.contains("domains")) {
      t.loop = io::loop_from_json(j.at("loop"));
      for (const auto& d : j.at("domains")) t.domains.push_back(io::domain_from_json(d));
    } else {
      const NestedConfig c = io::config_from_json(j);
      t.loop = c.loop;
      t.domains = {c.inner, c.outer};
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SpecParseError, e.what());
  }
  if (t.domains.size() < 2) throw Error(ErrorCode::SpecParseError, "a configuration needs at least two domains");
  for (std::size_t k = 1; k < t.domains.size(); ++k)
    if (!t.domains[k - 1].is_subset_of(t.domains[k])) throw Error(ErrorCode::InvalidConfig, "domains are not nested");
  t.outer_pair();
  return t;
}

std::string item_id(char prefix, std::size_t index, int level) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%05zu-r%d", prefix, index, level);
  return buf;
}

RestrictionEvaluator evaluator_named(const std::string& name, const ExperimentSpec& spec) {
  if (name == "ust") return ust_evaluator();
  if (name == "soup") return soup_evaluator(spec.c);
  if (name == "ising") return ising_evaluator(InverseTemperature(spec.beta), spec.engine);
  throw Error(ErrorCode::SpecParseError, "unknown evaluator '" + name + "'");
}

}  // namespace

std::vector<WorkItem> sweep_items(const ExperimentSpec& spec) {
  std::vector<NestedTriple> base;
  std::vector<char> prefix;
  if (spec.generator) {
    for (auto& t : generate_triples(*spec.generator, spec.seed)) base.push_back(std::move(t)), prefix.push_back('g');
  }
  for (const std::string& file : spec.config_files) {
    const json j = io::read_json_file(file);
    if (j.is_array()) {
      for (const auto& e : j) base.push_back(triple_from_json(e)), prefix.push_back('f');
    } else {
      base.push_back(triple_from_json(j)), prefix.push_back('f');
    }
  }
  std::vector<WorkItem> items;
  std::size_t g = 0, f = 0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    const std::size_t index = prefix[k] == 'g' ? g++ : f++;
    for (int level : spec.refine) {
      WorkItem w{item_id(prefix[k], index, level), base[k], level};
      if (level > 0) {
        w.triple.loop = refine(base[k].loop, level);
        for (auto& d : w.triple.domains) d = refine(d, level);
      }
      items.push_back(std::move(w));
    }
  }
  std::sort(items.begin(), items.end(), [](const WorkItem& a, const WorkItem& b) { return a.id < b.id; });
  return items;
}

std::vector<ResultRow> evaluate_item(const ExperimentSpec& spec, const WorkItem& item, const std::string& hash) {
  std::vector<ResultRow> rows;
  const int mesh = item.triple.domains.front().mesh_exponent();
  for (const std::string& q : spec.quantities) {
    ResultRow r;
    r.spec_hash = hash;
    r.config_id = item.id;
    r.quantity = q;
    r.mesh_exponent = mesh;
    r.engine = "logdet";
    try {
      const NestedConfig pair = item.triple.outer_pair();
      if (q == "ust_restriction") {
        r.value = ust_restriction(pair);
      } else if (q == "soup_mass") {
        r.value = soup_mass(pair);
      } else if (q == "ust_soup_sum") {
        r.value = ust_restriction(pair) + soup_mass(pair);
      } else if (q == "ising_restriction") {
        r.engine = to_string(spec.engine);
        r.value = ising_restriction(pair, InverseTemperature(spec.beta), spec.engine);
      } else if (q.rfind("cocycle_defect:", 0) == 0) {
        const RestrictionEvaluator f = evaluator_named(q.substr(15), spec);
        if (f.name.rfind("ising", 0) == 0) r.engine = to_string(spec.engine);
        if (item.triple.domains.size() != 3) throw Error(ErrorCode::InvalidConfig, "cocycle check needs three domains");
        const auto& d = item.triple.domains;
        const CocycleReport rep = check_cocycle(f, item.triple.loop, d[0], d[1], d[2], spec.tolerance);
        r.value = rep.defect;
        r.error_bound = rep.tolerance;
      } else {
        throw Error(ErrorCode::SpecParseError, "unknown quantity '" + q + "'");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::SpecParseError) throw;
      r.value = 0.0;
      r.status = std::string("failed:") + to_string(e.code());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace {

std::vector<ResultRow> run_lerw(const ExperimentSpec& spec, const std::string& hash) {
  const LerwSetup setup = lerw_annulus(spec.side);
  std::vector<std::vector<Site>> curves(spec.loops);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k; (k = next++) < curves.size();)
      curves[k] = sample_lerw_loop(setup.domain, setup.root, derive_seed(spec.seed, k)).sites;
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < std::max(1u, spec.jobs); ++t) pool.emplace_back(worker);
    worker();
  }
  std::vector<ResultRow> rows;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    char id[32];
    std::snprintf(id, sizeof id, "loop%05zu", k);
    rows.push_back({hash, id, "lerw_length", static_cast<double>(curves[k].size()), {}, "lerw", 0, "ok"});
  }
  ResultRow dim{hash, "all", "box_dimension", 0.0, {}, "lerw", 0, "ok"};
  try {
    const DimensionEstimate est = box_dimension(curves, spec.scales);
    dim.value = est.dimension;
    dim.error_bound = est.standard_error;
  } catch (const Error& e) {
    dim.status = std::string("failed:") + to_string(e.code());
  }
  rows.push_back(dim);
  return rows;
}

}  // namespace

SweepResult run_sweep(const ExperimentSpec& spec, const std::optional<std::filesystem::path>& journal) {
  const std::string hash = spec_hash(spec);
  std::vector<WorkItem> items;
  if (spec.kind == "harness") return {};
  if (spec.kind == "lerw") {
    items.push_back({"lerw", {}, 0});
  } else {
    items = sweep_items(spec);
  }

  json done = json::object();
  if (journal && std::filesystem::exists(*journal)) {
    const json j = io::read_json_file(*journal);
    if (j.value("spec_hash", std::string()) == hash) done = j.value("items", json::object());
  }

  SweepResult result;
  std::vector<std::vector<ResultRow>> slots(items.size());
  std::vector<std::size_t> todo;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (done.contains(items[k].id)) {
      for (const auto& r : done.at(items[k].id)) slots[k].push_back(row_from_json(r));
      ++result.resumed;
    } else {
      todo.push_back(k);
    }
  }

  std::mutex lock;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  const auto worker = [&] {
    for (std::size_t t; (t = next++) < todo.size();) {
      const std::size_t k = todo[t];
      try {
        std::vector<ResultRow> rows =
            spec.kind == "lerw" ? run_lerw(spec, hash) : evaluate_item(spec, items[k], hash);
        std::lock_guard guard(lock);
        slots[k] = std::move(rows);
        if (journal) {
          json arr = json::array();
          for (const auto& r : slots[k]) arr.push_back(to_json(r));
          done[items[k].id] = std::move(arr);
          io::write_text_file_atomic(*journal, json{{"spec_hash", hash}, {"items", done}}.dump() + "\n");
        }
      } catch (...) {
        std::lock_guard guard(lock);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned jobs = spec.kind == "lerw" ? 1u : std::max(1u, spec.jobs);
    for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  result.computed = todo.size();
  for (auto& s : slots)
    for (auto& r : s) result.rows.push_back(std::move(r));
  return result;
}

}  // namespace mks
