#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "finmodel/fincat.hpp"

namespace finmodel::model {

using fincat::Budget;
using fincat::CatPtr;
using fincat::Presheaf;
using fincat::PresheafMorphism;
using fincat::PresheafPtr;

enum class SoaMode { Naive, Marked };
enum class WeqStrategy { Oracle, Search };
enum class FactorKind { CofTrivFib, TrivCofFib };

/// A model-structure presentation: generating (trivial) cofibrations plus the
/// knobs controlling the factorization machinery.
struct ModelInstance {
  CatPtr base;
  std::vector<PresheafMorphism> cof_gens;       // generating cofibrations
  std::vector<PresheafMorphism> triv_cof_gens;  // generating trivial cofibrations
  WeqStrategy weq_strategy = WeqStrategy::Search;
  std::function<bool(const PresheafMorphism&)> weq_oracle;  // used by WeqStrategy::Oracle
  int iteration_cap = 64;
  SoaMode soa_mode = SoaMode::Marked;
  std::uint64_t budget = fincat::kDefaultBudget;

  const std::vector<PresheafMorphism>& gens_for(FactorKind k) const {
    return k == FactorKind::CofTrivFib ? cof_gens : triv_cof_gens;
  }
};

struct Stage {
  Presheaf object;         // F_i
  PresheafMorphism left;   // A -> F_i, accumulated relative cell morphism
  PresheafMorphism right;  // F_i -> B
  int cells_attached = 0;  // cells glued by the step that produced this stage
};

/// One factorization run. stages[0] is the input morphism itself (object = A,
/// left = id, right = f); every later stage is one soa_step applied to the
/// previous right leg. right . left == f at every stage.
struct FactorizationTrace {
  PresheafMorphism input;
  std::vector<Stage> stages;
  bool terminated = false;
  int steps_used = 0;

  const Stage& final_stage() const { return stages.back(); }
  const PresheafMorphism& left() const { return stages.back().left; }
  const PresheafMorphism& right() const { return stages.back().right; }
};

/// Raised when an iteration cap runs out inside an operation that cannot
/// return a partial answer; carries the partial trace.
class CapExhausted : public std::runtime_error {
 public:
  explicit CapExhausted(FactorizationTrace trace);
  const FactorizationTrace& trace() const noexcept { return trace_; }

 private:
  FactorizationTrace trace_;
};

/// One gluing stage of the small object argument applied to f: A -> B.
/// Returns (left: A -> F0, right: F0 -> B) with right . left == f.
///
/// Naive mode realizes the one-shot colimit: every span (u, h) with h a
/// generator and some v closing the square contributes a cell, with v the
/// first candidate in canonical order. Marked mode walks the commuting
/// squares in canonical order and glues a cell only for squares that have no
/// lift against the partially extended object, so already-solvable squares
/// attach nothing.
std::pair<PresheafMorphism, PresheafMorphism> soa_step(const PresheafMorphism& f,
                                                       const std::vector<PresheafMorphism>& gens,
                                                       SoaMode mode, Budget& budget);

/// Iterates soa_step until the right leg has the right lifting property
/// against the generators or the cap runs out; never throws on cap
/// exhaustion (terminated stays false).
FactorizationTrace factorize(const PresheafMorphism& f, FactorKind kind,
                             const ModelInstance& m);

enum class ReplacementKind { Cofibrant, Fibrant, Full };

struct Replacement {
  Presheaf object;
  PresheafMorphism comparison;  // cofibrant: R -> x; fibrant: x -> R
};

struct FullReplacement {
  Presheaf cofibrant;                 // Rc x
  PresheafMorphism from_cofibrant;    // Rc x -> x
  Presheaf object;                    // R x, fibrant and cofibrant
  PresheafMorphism to_object;         // Rc x -> R x
};

/// Throws CapExhausted with the partial trace when the factorization does
/// not terminate within the cap.
Replacement replacement(const Presheaf& x, ReplacementKind kind, const ModelInstance& m);
FullReplacement full_replacement(const Presheaf& x, const ModelInstance& m);

/// Cylinder data: a (cofibration, weak equivalence) factorization of the
/// fold map x + x -> x.
struct CylinderData {
  Presheaf object;            // C(x)
  PresheafMorphism end0;      // x -> C(x)
  PresheafMorphism end1;      // x -> C(x)
  PresheafMorphism collapse;  // C(x) -> x
};

CylinderData cylinder(const Presheaf& x, const ModelInstance& m);
CylinderData cylinder(const Presheaf& x, const ModelInstance& m, SoaMode mode);

bool is_fibrant(const Presheaf& x, const ModelInstance& m);

/// Witness h: C(K) -> L with h.end0 = f and h.end1 = g, if one exists.
std::optional<PresheafMorphism> left_homotopy_witness(const PresheafMorphism& f,
                                                      const PresheafMorphism& g,
                                                      const CylinderData& cyl, Budget& budget);

/// Exhaustive search for a homotopy through the marked-mode cylinder of the
/// shared source. The target must be fibrant for this to be an equivalence
/// relation; callers pass replaced objects.
bool left_homotopic(const PresheafMorphism& f, const PresheafMorphism& g,
                    const ModelInstance& m);

/// Oracle strategy consults the instance oracle; search strategy replaces
/// both ends and looks for a homotopy inverse of the replaced map.
bool is_weak_equivalence(const PresheafMorphism& f, const ModelInstance& m);

/// Replaced image R(f): R x -> R y of f: x -> y, computed by lifting through
/// the replacement comparisons.
PresheafMorphism replace_map(const PresheafMorphism& f, const FullReplacement& rx,
                             const FullReplacement& ry, const ModelInstance& m);

/// Homotopy classes of maps x -> f_target for cofibrant x and fibrant target:
/// enumeration-first representatives under left homotopy.
std::vector<PresheafMorphism> homotopy_classes(const PresheafPtr& x, const PresheafPtr& target,
                                               const ModelInstance& m);

}  // namespace finmodel::model
