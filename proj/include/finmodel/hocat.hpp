#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "finmodel/model.hpp"

namespace finmodel::hocat {

using fincat::Presheaf;
using fincat::PresheafMorphism;
using fincat::PresheafPtr;

/// Hom-set in the homotopy category: enumeration-first representatives of
/// the homotopy classes of maps between the replacements of two objects.
struct HoHomSet {
  PresheafPtr source_r;
  PresheafPtr target_r;
  std::vector<PresheafMorphism> classes;
};

/// A homotopy pushout of a span (f: A -> B, g: A -> C): both legs factored
/// as (cofibration, trivial fibration), the cofibration parts pushed out.
struct PushoutSquare {
  Presheaf object;              // E, the weak pushout at the factored level
  PresheafMorphism cof_left;    // A -> B1
  PresheafMorphism cof_right;   // A -> C1
  PresheafMorphism res_left;    // B1 -> B, trivial fibration
  PresheafMorphism res_right;   // C1 -> C, trivial fibration
  PresheafMorphism glue_left;   // B1 -> E
  PresheafMorphism glue_right;  // C1 -> E
};

struct WeakCoequalizer {
  PushoutSquare square;
  PresheafMorphism through;  // B -> E, the coequalizing leg (a class representative)
};

struct WeakColimit {
  Presheaf object;                        // the weak-colimit object E
  std::vector<PresheafMorphism> cocone;   // Dd -> E, class representatives
  PushoutSquare square;                   // the internal weak pushout
  fincat::ColimitResult object_sum;       // B = coproduct of the diagram objects
  fincat::ColimitResult arrow_sum;        // L = coproduct over all shape arrows
  PresheafMorphism pair_first, pair_second;  // the coequalized parallel pair L+B -> B
};

struct Comparison {
  PresheafMorphism map;  // E -> strict colimit
  bool exact_equations;  // the defining equations hold on the nose
};

struct CanonicalImage {
  std::vector<Presheaf> index_objects;
  std::vector<HoHomSet> hom_to_target;                 // per index object
  std::vector<std::vector<HoHomSet>> arrows;           // arrows[i][j]: hom(A_i, A_j)
  // precompose[i][j][t][c]: class c in hom(A_j, K) pulled back along arrow t
  std::vector<std::vector<std::vector<std::vector<int>>>> precompose;
};

struct FullFaithfulReport {
  bool full = true;
  bool faithful = true;
  int transformations_checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return full && faithful; }
};

struct PhantomPair {
  Presheaf target;           // the weak cokernel-pair object
  PresheafMorphism first;    // R x -> R target, representative
  PresheafMorphism second;   // R x -> R target, representative
  bool phantom_equivalent = false;
};

struct PhantomInitialityReport {
  bool initial = true;
  int pairs_checked = 0;
  std::vector<std::string> notes;
};

/// Calculator for one model instance. Caches replacements, cylinders,
/// fibrancy verdicts and hom-sets by the canonical keys of the objects;
/// everything observable stays a pure function of the inputs.
class HoCalc {
 public:
  explicit HoCalc(model::ModelInstance m) : m_(std::move(m)) {}

  const model::ModelInstance& instance() const { return m_; }

  const model::FullReplacement& replace(const Presheaf& x);
  const model::CylinderData& cylinder_of(const Presheaf& source);
  bool fibrant(const Presheaf& x);

  /// Left homotopy for parallel maps out of a cofibrant object into a
  /// fibrant one, through the cached cylinder of the source.
  bool homotopic(const PresheafMorphism& f, const PresheafMorphism& g);

  /// Homotopy classes of maps source -> target for cofibrant source and
  /// fibrant target, without replacing either.
  std::vector<PresheafMorphism> maps_up_to_homotopy(const PresheafPtr& source,
                                                    const PresheafPtr& target);

  const HoHomSet& ho_hom(const Presheaf& x, const Presheaf& y);
  int class_of(const HoHomSet& hom, const PresheafMorphism& map);

  /// Replaced image R(f) between the cached replacements.
  PresheafMorphism project_map(const PresheafMorphism& f);

  bool weq_map(const PresheafMorphism& f);
  bool weq_objects(const Presheaf& x, const Presheaf& y);

  struct FamilyResult {
    Presheaf object;                          // fibrant and cofibrant
    std::vector<PresheafMorphism> structure;  // projections from / injections into object
  };
  FamilyResult ho_product(const std::vector<Presheaf>& factors);
  FamilyResult ho_coproduct(const std::vector<Presheaf>& parts);

  PushoutSquare homotopy_pushout(const PresheafMorphism& f, const PresheafMorphism& g);

  /// Homotopy classes t: E -> T with t.glue_left ~ u.res_left and
  /// t.glue_right ~ w.res_right, for a cocone (u: B -> T, w: C -> T) into a
  /// fibrant T. Nonempty means the cocone factors; the size exhibits how
  /// non-uniquely.
  std::vector<PresheafMorphism> pushout_factorizations(const PushoutSquare& square,
                                                       const PresheafMorphism& u,
                                                       const PresheafMorphism& w);

  WeakCoequalizer weak_coequalizer(const PresheafMorphism& f, const PresheafMorphism& g);
  WeakColimit standard_weak_colimit(const fincat::Diagram& d);
  Comparison comparison_morphism(const WeakColimit& weak, const fincat::ColimitResult& strict,
                                 const fincat::Diagram& d);

  CanonicalImage canonical_image(const Presheaf& k, const std::vector<Presheaf>& index);
  FullFaithfulReport check_index_full_faithful(const std::vector<Presheaf>& index,
                                               const std::vector<Presheaf>& sample);

  bool phantom_equivalent(const Presheaf& x, const Presheaf& l, const PresheafMorphism& f_rep,
                          const PresheafMorphism& g_rep, const std::vector<Presheaf>& index);
  PhantomPair weakly_initial_phantom_pair(const Presheaf& x, const std::vector<Presheaf>& index);
  PhantomInitialityReport certify_phantom_initiality(const Presheaf& x, const PhantomPair& pair,
                                                     const std::vector<Presheaf>& index,
                                                     const std::vector<Presheaf>& targets);

 private:
  model::ModelInstance m_;
  std::map<std::string, model::FullReplacement> replacements_;
  std::map<std::string, model::CylinderData> cylinders_;
  std::map<std::string, bool> fibrancy_;
  std::map<std::pair<std::string, std::string>, HoHomSet> homsets_;
};

/// A section of a trivial fibration whose base object is cofibrant (the
/// inverse class of the fibration in the homotopy category).
PresheafMorphism section_of_trivial_fibration(const PresheafMorphism& p,
                                              const model::ModelInstance& m);

}  // namespace finmodel::hocat
