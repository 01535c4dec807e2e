#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tnkit/mpo.hpp"
#include "tnkit/peps.hpp"
#include "tnkit/symmetry.hpp"

namespace tnkit {

enum class CorpusKind { Mps, Peps, Mpo };
const char* corpus_kind_name(CorpusKind k);

// tag is "literature", "derived" or "trivial"; anchor names the construction the value comes from.
struct ExpectedProperty {
  std::string name;
  nlohmann::json value;
  std::string tag;
  std::string anchor;
  double tolerance = 0;  // 0: exact comparison
};

struct CorpusEntry {
  std::string name;
  CorpusKind kind = CorpusKind::Mps;
  nlohmann::json parameters = nlohmann::json::object();
  std::optional<UniformMps> mps;
  std::optional<PepsTensor> peps;
  std::optional<MpoTensor> mpo;
  std::vector<ExpectedProperty> expected;
};

struct CatalogItem {
  std::string name;
  CorpusKind kind;
  std::string summary;
  nlohmann::json defaults;
};
const std::vector<CatalogItem>& corpus_catalog();

CorpusEntry make(const std::string& name, const nlohmann::json& params = nlohmann::json::object());

// The periodic uniform MPS of an entry; open-boundary entries are refused.
UniformMps corpus_periodic_mps(const CorpusEntry& e);

// Symmetry carried by some entries (AKLT: Z2xZ2 pi rotations, blocked cluster: X on each sublattice).
std::optional<OnSiteSymmetry> corpus_symmetry(const CorpusEntry& e);

struct CorpusCheck {
  std::string entry, property;
  bool passed = false;
  nlohmann::json expected, actual;
  std::string detail;
};
struct CorpusReport {
  std::vector<CorpusCheck> checks;
  bool all_passed = true;
};
CorpusReport validate_entry(const CorpusEntry& e);
CorpusReport validate_corpus();

}  // namespace tnkit
