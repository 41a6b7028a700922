#include "mks/io.hpp"

#include <fstream>
#include <sstream>

namespace mks::io {

namespace {

json sites_to_json(const std::vector<Site>& sites) {
  json arr = json::array();
  for (const Site s : sites) arr.push_back({s.x, s.y});
  return arr;
}

std::vector<Site> sites_from_json(const json& arr) {
  if (!arr.is_array()) throw Error(ErrorCode::SpecParseError, "expected an array of [x, y] pairs");
  std::vector<Site> out;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) throw Error(ErrorCode::SpecParseError, "expected [x, y]");
    out.push_back({p[0].get<int>(), p[1].get<int>()});
  }
  return out;
}

}  // namespace

json to_json(const DiscreteDomain& d) {
  return {{"mesh_exponent", d.mesh_exponent()}, {"vertices", sites_to_json(d.sites())}};
}

json to_json(const DualLoop& l) { return {{"dual_sites", sites_to_json(l.sites())}}; }

json to_json(const NestedConfig& c) {
  return {{"loop", to_json(c.loop)}, {"inner", to_json(c.inner)}, {"outer", to_json(c.outer)}};
}

DiscreteDomain domain_from_json(const json& j) {
  try {
    return validate_domain(sites_from_json(j.at("vertices")), j.value("mesh_exponent", 0));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SpecParseError, e.what());
  }
}

DualLoop loop_from_json(const json& j) {
  try {
    return DualLoop::from_sites(sites_from_json(j.at("dual_sites")));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SpecParseError, e.what());
  }
}

NestedConfig config_from_json(const json& j) {
  try {
    return make_nested(loop_from_json(j.at("loop")), domain_from_json(j.at("inner")),
                       domain_from_json(j.at("outer")));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SpecParseError, e.what());
  }
}

std::string dump(const json& j) { return j.dump(1) + "\n"; }

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::SpecParseError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SpecParseError, path.string() + ": " + e.what());
  }
}

void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}


CircleDiffeo diffeo_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rotation") return rotate(j.at("alpha").get<double>());
    if (kind == "mobius") {
      const auto& c = j.at("c");
      const std::complex<double> cv = c.is_array() ? std::complex<double>(c.at(0).get<double>(), c.size() > 1 ? c.at(1).get<double>() : 0.0)
                                                   : std::complex<double>(c.get<double>(), 0.0);
      return CircleDiffeo::mobius(j.value("theta", 0.0), cv);
    }
    if (kind == "trig") {
      std::vector<std::pair<double, double>> coeffs;
      for (const auto& ab : j.value("coeffs", json::array())) coeffs.emplace_back(ab.at(0).get<double>(), ab.at(1).get<double>());
      return CircleDiffeo::trig(j.value("a0", 0.0), std::move(coeffs));
    }
    if (kind == "compose") {
      const auto& maps = j.at("maps");
      if (!maps.is_array() || maps.empty()) throw Error(ErrorCode::SpecParseError, "compose needs a non-empty map list");
      CircleDiffeo out = diffeo_from_json(maps.back());
      for (std::size_t k = maps.size() - 1; k-- > 0;) out = compose(diffeo_from_json(maps[k]), out);
      return out;
    }
    if (kind == "inverse") return invert(diffeo_from_json(j.at("map")));
    throw Error(ErrorCode::SpecParseError, "unknown circle map kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::SpecParseError, e.what());
  }
}

CircleDiffeo parse_map(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return diffeo_from_json(read_json_file(text));
  const std::string kind = text.substr(0, colon);
  std::vector<double> v;
  std::stringstream ss(text.substr(colon + 1));
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      v.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::SpecParseError, "bad number '" + item + "' in map spec");
    }
  }
  if (kind == "rotation" && v.size() == 1) return rotate(v[0]);
  if (kind == "mobius" && (v.size() == 2 || v.size() == 3))
    return CircleDiffeo::mobius(v[0], {v[1], v.size() == 3 ? v[2] : 0.0});
  if (kind == "trig" && !v.empty() && v.size() % 2 == 1) {
    std::vector<std::pair<double, double>> coeffs;
    for (std::size_t k = 1; k + 1 < v.size(); k += 2) coeffs.emplace_back(v[k], v[k + 1]);
    return CircleDiffeo::trig(v[0], std::move(coeffs));
  }
  throw Error(ErrorCode::SpecParseError, "cannot parse map spec '" + text + "'");
}

}  // namespace mks::io
