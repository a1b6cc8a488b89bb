#include "fraisse/json_io.hpp"

#include <fstream>
#include <sstream>

#include "fraisse/error.hpp"

namespace fraisse {

json signature_to_json(const Signature& sig) {
    json out = json::array();
    for (const auto& r : sig) out.push_back({{"name", r.name}, {"arity", r.arity}});
    return out;
}

Signature signature_from_json(const json& j) {
    std::vector<Relation> rels;
    for (const auto& r : j) rels.push_back({r.at("name").get<std::string>(), r.at("arity").get<int>()});
    return Signature(rels);
}

json tuple_list(const std::vector<Tuple>& tuples) {
    json out = json::array();
    for (const auto& t : tuples) out.push_back(t);
    return out;
}

json structure_to_json(const FiniteStructure& s) {
    json rels = json::object();
    for (std::size_t r = 0; r < s.signature().size(); ++r) rels[s.signature()[r].name] = tuple_list(s.tuples(r));
    return {{"signature", signature_to_json(s.signature())}, {"size", s.size()}, {"relations", rels}};
}

FiniteStructure structure_from_json(const json& j) {
    try {
        FiniteStructure s(signature_from_json(j.at("signature")), j.at("size").get<int>());
        if (j.contains("relations")) {
            for (const auto& [name, tuples] : j.at("relations").items()) {
                int rel = s.signature().index_of(name);
                if (rel < 0) throw Error(ErrorCode::UnknownRelation, name);
                for (const auto& t : tuples) s.set(static_cast<std::size_t>(rel), t.get<Tuple>());
            }
        }
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Parse, std::string("structure JSON: ") + e.what());
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Usage, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace fraisse
