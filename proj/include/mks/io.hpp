#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "mks/circle.hpp"
#include "mks/lattice.hpp"

namespace mks::io {

using nlohmann::json;

// Domain:  { "mesh_exponent": k, "vertices": [[x, y], ...] }  (sorted)
// Loop:    { "dual_sites": [[x, y], ...] }  (doubled coordinates, canonical)
// Config:  { "loop": <loop>, "inner": <domain>, "outer": <domain> }
// Triple:  { "loop": <loop>, "domains": [<d1>, <d2>, <d3>] }
json to_json(const DiscreteDomain& d);
json to_json(const DualLoop& l);
json to_json(const NestedConfig& c);

DiscreteDomain domain_from_json(const json& j);
DualLoop loop_from_json(const json& j);
NestedConfig config_from_json(const json& j);

// Circle map:
//   { "kind": "rotation", "alpha": a }
//   { "kind": "mobius", "theta": t, "c": [re, im] }
//   { "kind": "trig", "a0": a0, "coeffs": [[a1, b1], [a2, b2], ...] }
//   { "kind": "compose", "maps": [f, g, ...] }   (f o g o ...)
//   { "kind": "inverse", "map": f }
CircleDiffeo diffeo_from_json(const json& j);
/// "rotation:a", "mobius:theta,re[,im]", "trig:a0,a1,b1,..." or a path to a
/// JSON file in the format above.
CircleDiffeo parse_map(const std::string& text);

/// Pretty-printed canonical text, byte-stable for equal objects.
std::string dump(const json& j);

json read_json_file(const std::filesystem::path& path);
void write_text_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace mks::io
