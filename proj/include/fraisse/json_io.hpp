#pragma once

#include <json.hpp>

#include "fraisse/structure.hpp"

namespace fraisse {

using json = nlohmann::json;

json signature_to_json(const Signature& sig);
Signature signature_from_json(const json& j);

// {"signature":[{"name":"E","arity":2}],"size":3,"relations":{"E":[[0,1],[1,0]]}}
json structure_to_json(const FiniteStructure& s);
FiniteStructure structure_from_json(const json& j);

json tuple_list(const std::vector<Tuple>& tuples);

std::string read_text_file(const std::string& path);

}  // namespace fraisse
