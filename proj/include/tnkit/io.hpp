#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tnkit/corpus.hpp"

namespace tnkit::io {

using nlohmann::json;

// [[re, im], ...]
json complex_array(const std::vector<cplx>& v);
std::vector<cplx> parse_complex_array(const json& j, std::size_t expected, const std::string& what);

json to_json(const Mat& m);
Mat matrix_from_json(const json& j);

json to_json(const UniformMps& m);
UniformMps mps_from_json(const json& j);

json to_json(const MpoTensor& o);
MpoTensor mpo_from_json(const json& j);

// One tensor as {"dims": {...}, "data": [...]}.
json tensor_to_json(const PepsTensor& t);
PepsTensor peps_tensor_from_json(const json& j);
json to_json(const PepsPatch& p);
// A one-element tensor list is repeated on every site.
PepsPatch peps_from_json(const json& j);

json to_json(const FiniteGroup& g);
// Either a name such as "z2xz2" or {"table": [[...]]}.
FiniteGroup group_from_json(const json& j);

json to_json(const OnSiteSymmetry& s);
OnSiteSymmetry symmetry_from_json(const json& j);

json to_json(const std::vector<PlacedOp>& ops);
std::vector<PlacedOp> ops_from_json(const json& j);

json to_json(const CorpusEntry& e);
CorpusEntry corpus_entry_from_json(const json& j);

std::uint64_t fnv1a(std::string_view bytes);
std::string fnv1a_hex(std::string_view bytes);

}  // namespace tnkit::io
