#pragma once

#include <array>
#include <string>
#include <vector>

#include "finmodel/model.hpp"

namespace finmodel::sset {

using fincat::Budget;
using fincat::CatPtr;
using fincat::Presheaf;
using fincat::PresheafMorphism;
using fincat::PresheafPtr;

/// Inputs outside the classification corpus a bounded operation covers.
class CorpusBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The category of ordinals {1, ..., n} with all order-preserving maps.
/// Shared instance per n; presheaves on it are n-truncated simplicial sets
/// (n = 1: sets, n = 2: oriented multigraphs with loops).
CatPtr simplex_category(int n);

/// Standard objects, 0 <= m <= n. delta(n, n) is the truncated representable:
/// it omits exactly the top cell.
Presheaf delta(int n, int m);
Presheaf boundary(int n, int m);        // cells not surjective onto the vertices
Presheaf horn(int n, int m, int k);     // cells missing some vertex other than k
PresheafMorphism boundary_inclusion(int n, int m);
PresheafMorphism horn_inclusion(int n, int m, int k);

struct Generators {
  std::vector<PresheafMorphism> cof;        // boundary inclusions
  std::vector<PresheafMorphism> triv_cof;   // horn inclusions
};

/// I_n and J_n. J_1 is the single vertex inclusion 1 -> 2; J_2 is the two
/// level-1 vertex inclusions plus the two outer level-2 horns (the pictured
/// generators and their orientation variants); J_3 takes every horn.
Generators generators(int n);

struct ModelOptions {
  int iteration_cap = 64;
  std::uint64_t budget = fincat::kDefaultBudget;
};

struct SSetInstance {
  int n = 0;
  CatPtr cat;
  model::ModelInstance model;
};

SSetInstance make_instance(int n, const ModelOptions& opts = {});

/// Closed-form weak equivalence test for n = 1, 2; delegates to map-level
/// search for n = 3 (may exhaust caps on objects without finite fibrant
/// replacements).
bool weq_oracle(const SSetInstance& inst, const PresheafMorphism& f);

/// Connected components of the underlying undirected reachability relation.
int pi0(const Presheaf& x);
std::vector<int> pi0_labels(const Presheaf& x);  // per-vertex component index

// --- complexes from nondegenerate data --------------------------------------

/// Nondegenerate cells of a level-n complex. Level-2 carrier layout: the
/// degenerate loop of vertex v sits at index v, nondegenerate edge j at
/// vertices + j; triangle faces reference that layout (d0 = the 12 edge,
/// d1 = 02, d2 = 01).
struct ComplexSpec {
  int n = 2;
  int vertices = 0;
  std::vector<std::array<int, 2>> edges;      // (source, target)
  std::vector<std::array<int, 3>> triangles;  // (d0, d1, d2) level-2 indices
};

Presheaf build_complex(const ComplexSpec& spec);

int edge_source(const Presheaf& x, int edge);
int edge_target(const Presheaf& x, int edge);
bool edge_is_degenerate(const Presheaf& x, int edge);

// Handy builders.
Presheaf finite_set(int n_elements);                 // level-1 object
Presheaf graph(int vertices, std::vector<std::array<int, 2>> edges);  // level 2
Presheaf point(int n);                               // one vertex, level n
Presheaf point_with_loops(int n, int loops);         // one vertex, k loop edges
Presheaf nerve_z2();                                 // level-3 nerve of Z/2, fibrant

// --- corpora -----------------------------------------------------------------

std::vector<Presheaf> set_corpus(int max_size);

/// One representative per isomorphism class of multigraphs with at most the
/// given number of vertices and nondegenerate edges (loops allowed), in a
/// deterministic canonical order.
std::vector<Presheaf> multigraph_corpus(int max_vertices, int max_edges);

/// True iff some componentwise bijection x -> y exists.
bool isomorphic(const Presheaf& x, const Presheaf& y, Budget& budget);

// --- forests -----------------------------------------------------------------

/// Canonical classifying form: a multiset of rooted trees serialized as
/// sorted nested parentheses.
struct Forest {
  std::vector<std::string> trees;
  std::string serialize() const;
  bool operator==(const Forest& other) const { return serialize() == other.serialize(); }
};

/// Classification-backed invariant. n = 1: empty vs one root; n = 2: one
/// root per component; n = 3: defined on disjoint unions of the three
/// pictured one-vertex shapes (bare, one loop, two loops), which map to the
/// trees (), (()) and (()()); anything else raises CorpusBoundError.
Forest forest_invariant(const SSetInstance& inst, const Presheaf& x);

}  // namespace finmodel::sset
