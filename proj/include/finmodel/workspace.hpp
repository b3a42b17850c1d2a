#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "finmodel/chain.hpp"
#include "finmodel/hocat.hpp"
#include "finmodel/sset.hpp"

namespace finmodel::ws {

/// Malformed document text (JSON syntax).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A command or morphism refers to a name that was never declared.
class NameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally well-formed input that violates an invariant (naturality,
/// d.d = 0, carrier shapes).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parsed workspace: one instance selector, named objects and morphisms,
/// and a command list. Holds the normalized document for round-tripping.
struct Workspace {
  int sset_level = 0;  // 1..3 when the instance is a truncated simplicial one
  int chain_p = 0;     // field characteristic when the instance is chain:p
  bool is_sset() const { return sset_level > 0; }

  sset::SSetInstance instance;  // populated for sset workspaces
  std::map<std::string, fincat::Presheaf> objects;
  std::map<std::string, fincat::PresheafMorphism> morphisms;
  std::map<std::string, chain::ChainComplex> complexes;
  std::map<std::string, chain::ChainMap> chain_maps;

  std::string normalized;  // canonical serialization of the parsed document
};

/// Parses and validates a workspace document. Throws ParseError, NameError
/// or ValidationError. The default enumeration budget honors the
/// FINMODEL_BUDGET environment variable unless the document overrides it.
Workspace parse(const std::string& text);

/// Canonical serialization; parse(serialize(w)) reproduces w.
std::string serialize(const Workspace& w);

struct RunResult {
  std::string report;
  int exit_code = 0;  // 0 success, 1 any command errored
};

/// Executes the command list in order, producing a deterministic report
/// (one numbered line per command, stable orderings throughout). Command
/// failures are embedded in the report, not thrown.
RunResult run(const Workspace& w);

}  // namespace finmodel::ws
