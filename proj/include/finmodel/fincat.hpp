#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace finmodel::fincat {

/// Thrown when an exhaustive search exceeds its work budget.
class SizeGuardError : public std::runtime_error {
 public:
  SizeGuardError(const std::string& where, std::uint64_t limit);
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t limit_;
};

/// Ill-typed input data: mismatched carriers, bad indices, incompatible bases.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

/// Work counter shared by the enumerations of one top-level operation.
/// Counts candidate assignments; overrunning the limit throws, it never
/// truncates silently.
class Budget {
 public:
  explicit Budget(std::uint64_t limit = kDefaultBudget) : limit_(limit) {}

  void charge(const char* where) {
    if (++used_ > limit_) throw SizeGuardError(where, limit_);
  }
  std::uint64_t used() const noexcept { return used_; }
  std::uint64_t limit() const noexcept { return limit_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

struct MorData {
  std::string name;
  int source = 0;
  int target = 0;
};

/// A finite category: object list, total morphism list (identities included)
/// and a full composition table. compose(g, f) is defined when
/// target(f) == source(g).
class FinCategory {
 public:
  FinCategory(std::vector<std::string> objects, std::vector<MorData> morphisms,
              std::vector<int> identities, std::vector<std::vector<int>> composition);

  int object_count() const noexcept { return static_cast<int>(objects_.size()); }
  int morphism_count() const noexcept { return static_cast<int>(morphisms_.size()); }
  const std::string& object_name(int o) const { return objects_.at(o); }
  const std::string& morphism_name(int m) const { return morphisms_.at(m).name; }
  int source(int m) const { return morphisms_.at(m).source; }
  int target(int m) const { return morphisms_.at(m).target; }
  int identity(int o) const { return identities_.at(o); }
  bool is_identity(int m) const { return identities_.at(morphisms_.at(m).source) == m; }

  /// g after f; throws ShapeError on non-composable pairs.
  int compose(int g, int f) const;

  /// Associativity / identity / typing violations; empty iff this is a category.
  std::vector<std::string> validate() const;

 private:
  std::vector<std::string> objects_;
  std::vector<MorData> morphisms_;
  std::vector<int> identities_;
  std::vector<std::vector<int>> composition_;  // composition_[g][f]
};

using CatPtr = std::shared_ptr<const FinCategory>;

/// A finite-set-valued presheaf on a FinCategory. Carriers are index ranges
/// 0..card-1; the action of m: c -> c' is a function X(c') -> X(c).
class Presheaf {
 public:
  Presheaf(CatPtr base, std::vector<int> cards, std::vector<std::vector<int>> actions,
           std::vector<std::vector<std::string>> labels = {});

  const CatPtr& base() const noexcept { return base_; }
  int card(int obj) const { return cards_.at(obj); }
  const std::vector<int>& cards() const noexcept { return cards_; }
  int act(int mor, int elem) const { return actions_.at(mor).at(elem); }
  const std::vector<int>& action(int mor) const { return actions_.at(mor); }
  std::size_t total_cells() const;

  bool has_labels() const noexcept { return !labels_.empty(); }
  const std::string& label(int obj, int elem) const { return labels_.at(obj).at(elem); }

  /// Functoriality violations (identity / composition mismatches).
  std::vector<std::string> validate() const;

  /// Deterministic serialization; equal keys iff structurally equal.
  std::string canonical_key() const;

  bool operator==(const Presheaf& other) const;

 private:
  CatPtr base_;
  std::vector<int> cards_;
  std::vector<std::vector<int>> actions_;
  std::vector<std::vector<std::string>> labels_;
};

using PresheafPtr = std::shared_ptr<const Presheaf>;

inline PresheafPtr share(Presheaf p) { return std::make_shared<const Presheaf>(std::move(p)); }

Presheaf initial_presheaf(CatPtr base);
Presheaf terminal_presheaf(CatPtr base);

/// A natural transformation between presheaves on the same base.
class PresheafMorphism {
 public:
  PresheafMorphism(PresheafPtr source, PresheafPtr target,
                   std::vector<std::vector<int>> components);

  static PresheafMorphism identity(PresheafPtr x);
  static PresheafMorphism constant_to_terminal(PresheafPtr x, PresheafPtr terminal);

  const Presheaf& source() const noexcept { return *source_; }
  const Presheaf& target() const noexcept { return *target_; }
  const PresheafPtr& source_ptr() const noexcept { return source_; }
  const PresheafPtr& target_ptr() const noexcept { return target_; }
  int comp(int obj, int elem) const { return components_.at(obj).at(elem); }
  const std::vector<std::vector<int>>& components() const noexcept { return components_; }

  /// Failing naturality squares, one line per (morphism, element) pair.
  std::vector<std::string> check_naturality() const;
  bool is_natural() const { return check_naturality().empty(); }

  bool is_mono() const;  // componentwise injective
  bool is_iso() const;   // componentwise bijective

  std::string canonical_key() const;
  bool operator==(const PresheafMorphism& other) const;

 private:
  PresheafPtr source_;
  PresheafPtr target_;
  std::vector<std::vector<int>> components_;
};

/// g after f. Requires target(f) == source(g) structurally.
PresheafMorphism compose(const PresheafMorphism& g, const PresheafMorphism& f);

/// A commuting square: left i: A -> B, right f: X -> Y, top u: A -> X,
/// bottom v: B -> Y with f.u = v.i.
struct LiftingProblem {
  PresheafMorphism left;
  PresheafMorphism right;
  PresheafMorphism top;
  PresheafMorphism bottom;

  bool commutes() const;
};

/// All natural transformations x -> y in lexicographic order on the
/// flattened component tuple (objects in base order, elements ascending).
std::vector<PresheafMorphism> enumerate_maps(const PresheafPtr& x, const PresheafPtr& y,
                                             Budget& budget);

struct Pin {
  int obj;
  int elem;
  int value;
};

/// enumerate_maps restricted to transformations taking the pinned elements
/// to the pinned values. Conflicting pins yield an empty list.
std::vector<PresheafMorphism> enumerate_maps_pinned(const PresheafPtr& x, const PresheafPtr& y,
                                                    const std::vector<Pin>& pins,
                                                    Budget& budget);

/// First diagonal d: B -> X with d.i = top and f.d = bottom, in the canonical
/// order, or nullopt when the exhaustive search finds none.
std::optional<PresheafMorphism> find_lift(const LiftingProblem& p, Budget& budget);

/// True iff every commuting square from every generator onto f has a lift.
bool has_rlp(const PresheafMorphism& f, const std::vector<PresheafMorphism>& gens,
             Budget& budget);

// --- finite colimits -------------------------------------------------------

struct Diagram {
  CatPtr shape;
  std::vector<Presheaf> objects;          // one per shape object
  std::vector<PresheafMorphism> arrows;   // one per shape morphism (identities may repeat objects)
};

struct ColimitResult {
  Presheaf object;
  std::vector<PresheafMorphism> legs;
};

/// Strict colimit via disjoint union followed by a union-find quotient over
/// the relations induced by the diagram arrows; computed objectwise.
ColimitResult finite_colimit(const Diagram& d);

ColimitResult coproduct(CatPtr base, const std::vector<Presheaf>& parts);
ColimitResult pushout(const PresheafMorphism& f, const PresheafMorphism& g);     // span legs share a source
ColimitResult coequalizer(const PresheafMorphism& f, const PresheafMorphism& g); // parallel pair

/// Indices of coproduct summands met by the image of f; f's target must be
/// the coproduct object, with the injections passed alongside.
std::vector<int> subcoproduct_support(const PresheafMorphism& f,
                                      const std::vector<PresheafMorphism>& injections);

/// The morphism out of a computed colimit determined by a cocone on its
/// parts (one morphism per leg, all into one target). Throws ShapeError if
/// the cocone does not respect the identifications.
PresheafMorphism colimit_induced(const ColimitResult& col,
                                 const std::vector<PresheafMorphism>& cocone);

/// Objectwise product with projections. Used for the homotopy-category
/// product construction; not a general limit facility.
struct ProductResult {
  Presheaf object;
  std::vector<PresheafMorphism> projections;
};
ProductResult presheaf_product(CatPtr base, const std::vector<Presheaf>& factors);

}  // namespace finmodel::fincat
