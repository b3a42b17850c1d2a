#include "finmodel/fincat.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace finmodel::fincat {

SizeGuardError::SizeGuardError(const std::string& where, std::uint64_t limit)
    : std::runtime_error("size guard exceeded in " + where + " (budget " +
                         std::to_string(limit) + ")"),
      limit_(limit) {}

// --- FinCategory -----------------------------------------------------------

FinCategory::FinCategory(std::vector<std::string> objects, std::vector<MorData> morphisms,
                         std::vector<int> identities, std::vector<std::vector<int>> composition)
    : objects_(std::move(objects)),
      morphisms_(std::move(morphisms)),
      identities_(std::move(identities)),
      composition_(std::move(composition)) {
  if (identities_.size() != objects_.size())
    throw ShapeError("one identity per object required");
  if (composition_.size() != morphisms_.size())
    throw ShapeError("composition table must have one row per morphism");
  for (const auto& row : composition_)
    if (row.size() != morphisms_.size())
      throw ShapeError("composition table must be square");
}

int FinCategory::compose(int g, int f) const {
  if (target(f) != source(g)) throw ShapeError("compose: morphisms not composable");
  int r = composition_.at(g).at(f);
  if (r < 0) throw ShapeError("compose: composition table has no entry");
  return r;
}

std::vector<std::string> FinCategory::validate() const {
  std::vector<std::string> report;
  const int n = morphism_count();
  for (int o = 0; o < object_count(); ++o) {
    int e = identities_.at(o);
    if (source(e) != o || target(e) != o)
      report.push_back("identity of " + objects_[o] + " is not an endomorphism");
  }
  for (int g = 0; g < n; ++g)
    for (int f = 0; f < n; ++f) {
      if (target(f) != source(g)) {
        if (composition_[g][f] >= 0)
          report.push_back("table entry for non-composable pair (" + morphisms_[g].name +
                           ", " + morphisms_[f].name + ")");
        continue;
      }
      int gf = composition_[g][f];
      if (gf < 0) {
        report.push_back("missing composite (" + morphisms_[g].name + ", " +
                         morphisms_[f].name + ")");
        continue;
      }
      if (source(gf) != source(f) || target(gf) != target(g))
        report.push_back("composite (" + morphisms_[g].name + ", " + morphisms_[f].name +
                         ") has wrong endpoints");
    }
  for (int f = 0; f < n; ++f) {
    int l = identities_.at(target(f));
    int r = identities_.at(source(f));
    if (composition_[l][f] != f)
      report.push_back("left identity fails for " + morphisms_[f].name);
    if (composition_[f][r] != f)
      report.push_back("right identity fails for " + morphisms_[f].name);
  }
  // Associativity over all composable triples.
  for (int h = 0; h < n; ++h)
    for (int g = 0; g < n; ++g) {
      if (target(g) != source(h)) continue;
      int hg = composition_[h][g];
      if (hg < 0) continue;
      for (int f = 0; f < n; ++f) {
        if (target(f) != source(g)) continue;
        int gf = composition_[g][f];
        if (gf < 0) continue;
        if (composition_[h][gf] != composition_[hg][f])
          report.push_back("associativity fails on (" + morphisms_[h].name + ", " +
                           morphisms_[g].name + ", " + morphisms_[f].name + ")");
      }
    }
  return report;
}

// --- Presheaf ---------------------------------------------------------------

Presheaf::Presheaf(CatPtr base, std::vector<int> cards, std::vector<std::vector<int>> actions,
                   std::vector<std::vector<std::string>> labels)
    : base_(std::move(base)),
      cards_(std::move(cards)),
      actions_(std::move(actions)),
      labels_(std::move(labels)) {
  if (!base_) throw ShapeError("presheaf needs a base category");
  if (static_cast<int>(cards_.size()) != base_->object_count())
    throw ShapeError("presheaf carrier count mismatch");
  if (static_cast<int>(actions_.size()) != base_->morphism_count())
    throw ShapeError("presheaf action count mismatch");
  for (int m = 0; m < base_->morphism_count(); ++m) {
    const int src = base_->source(m), tgt = base_->target(m);
    if (static_cast<int>(actions_[m].size()) != cards_[tgt])
      throw ShapeError("action of " + base_->morphism_name(m) + " has wrong domain size");
    for (int v : actions_[m])
      if (v < 0 || v >= cards_[src])
        throw ShapeError("action of " + base_->morphism_name(m) + " maps out of range");
  }
}

std::size_t Presheaf::total_cells() const {
  return std::accumulate(cards_.begin(), cards_.end(), std::size_t{0});
}

std::vector<std::string> Presheaf::validate() const {
  std::vector<std::string> report;
  const auto& cat = *base_;
  for (int o = 0; o < cat.object_count(); ++o) {
    int e = cat.identity(o);
    for (int x = 0; x < cards_[o]; ++x)
      if (actions_[e][x] != x) {
        report.push_back("identity action fails at " + cat.object_name(o));
        break;
      }
  }
  // Contravariance: X(g.f) = X(f) . X(g).
  for (int g = 0; g < cat.morphism_count(); ++g)
    for (int f = 0; f < cat.morphism_count(); ++f) {
      if (cat.target(f) != cat.source(g)) continue;
      int gf = cat.compose(g, f);
      bool ok = true;
      for (int x = 0; x < cards_[cat.target(g)] && ok; ++x)
        ok = actions_[gf][x] == actions_[f][actions_[g][x]];
      if (!ok)
        report.push_back("functoriality fails on (" + cat.morphism_name(g) + ", " +
                         cat.morphism_name(f) + ")");
    }
  return report;
}

std::string Presheaf::canonical_key() const {
  std::ostringstream os;
  os << "P[";
  for (int c : cards_) os << c << ",";
  os << "|";
  for (const auto& a : actions_) {
    for (int v : a) os << v << ",";
    os << ";";
  }
  os << "]";
  return os.str();
}

bool Presheaf::operator==(const Presheaf& other) const {
  return base_.get() == other.base_.get() && cards_ == other.cards_ &&
         actions_ == other.actions_;
}

Presheaf initial_presheaf(CatPtr base) {
  std::vector<int> cards(base->object_count(), 0);
  std::vector<std::vector<int>> actions(base->morphism_count());
  return Presheaf(std::move(base), std::move(cards), std::move(actions));
}

Presheaf terminal_presheaf(CatPtr base) {
  std::vector<int> cards(base->object_count(), 1);
  std::vector<std::vector<int>> actions(base->morphism_count(), std::vector<int>{0});
  return Presheaf(std::move(base), std::move(cards), std::move(actions));
}

// --- PresheafMorphism --------------------------------------------------------

PresheafMorphism::PresheafMorphism(PresheafPtr source, PresheafPtr target,
                                   std::vector<std::vector<int>> components)
    : source_(std::move(source)), target_(std::move(target)), components_(std::move(components)) {
  if (!source_ || !target_) throw ShapeError("morphism needs endpoints");
  if (source_->base().get() != target_->base().get())
    throw ShapeError("morphism endpoints live on different base categories");
  const int nobj = source_->base()->object_count();
  if (static_cast<int>(components_.size()) != nobj)
    throw ShapeError("morphism component count mismatch");
  for (int o = 0; o < nobj; ++o) {
    if (static_cast<int>(components_[o].size()) != source_->card(o))
      throw ShapeError("morphism component has wrong domain size");
    for (int v : components_[o])
      if (v < 0 || v >= target_->card(o))
        throw ShapeError("morphism component maps out of range");
  }
}

PresheafMorphism PresheafMorphism::identity(PresheafPtr x) {
  std::vector<std::vector<int>> comps(x->base()->object_count());
  for (int o = 0; o < x->base()->object_count(); ++o) {
    comps[o].resize(x->card(o));
    std::iota(comps[o].begin(), comps[o].end(), 0);
  }
  return PresheafMorphism(x, x, std::move(comps));
}

PresheafMorphism PresheafMorphism::constant_to_terminal(PresheafPtr x, PresheafPtr terminal) {
  std::vector<std::vector<int>> comps(x->base()->object_count());
  for (int o = 0; o < x->base()->object_count(); ++o) comps[o].assign(x->card(o), 0);
  return PresheafMorphism(std::move(x), std::move(terminal), std::move(comps));
}

std::vector<std::string> PresheafMorphism::check_naturality() const {
  std::vector<std::string> report;
  const auto& cat = *source_->base();
  for (int m = 0; m < cat.morphism_count(); ++m) {
    if (cat.is_identity(m)) continue;
    const int src = cat.source(m), tgt = cat.target(m);
    for (int e = 0; e < source_->card(tgt); ++e) {
      // component_src(X(m)(e)) must equal Y(m)(component_tgt(e))
      int lhs = components_[src][source_->act(m, e)];
      int rhs = target_->act(m, components_[tgt][e]);
      if (lhs != rhs)
        report.push_back("square fails for " + cat.morphism_name(m) + " at element " +
                         std::to_string(e) + " of " + cat.object_name(tgt));
    }
  }
  return report;
}

bool PresheafMorphism::is_mono() const {
  for (std::size_t o = 0; o < components_.size(); ++o) {
    std::vector<char> seen(target_->card(static_cast<int>(o)), 0);
    for (int v : components_[o]) {
      if (seen[v]) return false;
      seen[v] = 1;
    }
  }
  return true;
}

bool PresheafMorphism::is_iso() const {
  if (!is_mono()) return false;
  for (std::size_t o = 0; o < components_.size(); ++o)
    if (static_cast<int>(components_[o].size()) != target_->card(static_cast<int>(o)))
      return false;
  return true;
}

std::string PresheafMorphism::canonical_key() const {
  std::ostringstream os;
  os << source_->canonical_key() << "->" << target_->canonical_key() << ":";
  for (const auto& c : components_) {
    for (int v : c) os << v << ",";
    os << ";";
  }
  return os.str();
}

bool PresheafMorphism::operator==(const PresheafMorphism& other) const {
  return *source_ == *other.source_ && *target_ == *other.target_ &&
         components_ == other.components_;
}

PresheafMorphism compose(const PresheafMorphism& g, const PresheafMorphism& f) {
  if (!(f.target() == g.source())) throw ShapeError("compose: middle objects differ");
  const int nobj = f.source().base()->object_count();
  std::vector<std::vector<int>> comps(nobj);
  for (int o = 0; o < nobj; ++o) {
    comps[o].resize(f.source().card(o));
    for (int e = 0; e < f.source().card(o); ++e) comps[o][e] = g.comp(o, f.comp(o, e));
  }
  return PresheafMorphism(f.source_ptr(), g.target_ptr(), std::move(comps));
}

bool LiftingProblem::commutes() const {
  return compose(right, top) == compose(bottom, left);
}

// --- constrained enumeration -------------------------------------------------

namespace {

// Backtracking search over the flattened component tuple of a map x -> y.
// Slots are (object, element) pairs. Assignments propagate forward through
// the naturality constraints (the image of a cell forces the images of all
// its faces and degeneracies), which keeps the search linear-ish on
// presheaves whose structure is driven by top cells. Search order walks
// objects in descending index so that driving cells come first; callers
// needing the component-lexicographic order sort the emitted maps.
class MapSearch {
 public:
  MapSearch(const PresheafPtr& x, const PresheafPtr& y, Budget& budget)
      : x_(x), y_(y), budget_(budget) {
    const auto& cat = *x->base();
    const int nobj = cat.object_count();
    offset_.resize(nobj + 1, 0);
    for (int o = 0; o < nobj; ++o) offset_[o + 1] = offset_[o] + x->card(o);
    total_ = offset_[nobj];
    value_.assign(total_, -1);
    pinned_.assign(total_, -1);
    allowed_.resize(total_);
    restricted_.assign(total_, 0);
    out_of_.resize(total_);
    in_of_.resize(total_);
    slot_obj_.resize(total_);
    for (int o = 0; o < nobj; ++o)
      for (int e = 0; e < x->card(o); ++e) slot_obj_[offset_[o] + e] = o;
    for (int m = 0; m < cat.morphism_count(); ++m) {
      if (cat.is_identity(m)) continue;
      const int src = cat.source(m), tgt = cat.target(m);
      for (int e = 0; e < x->card(tgt); ++e) {
        Constraint c{offset_[tgt] + e, offset_[src] + x->act(m, e), m};
        out_of_[c.in_slot].push_back(c);
        in_of_[c.out_slot].push_back(c);
      }
    }
    order_.reserve(total_);
    for (int o = nobj - 1; o >= 0; --o)
      for (int e = 0; e < x->card(o); ++e) order_.push_back(offset_[o] + e);
  }

  int slot_of(int obj, int elem) const { return offset_[obj] + elem; }

  // Pinning the same slot twice with different values makes the search empty.
  void pin(int obj, int elem, int val) {
    int s = slot_of(obj, elem);
    if (pinned_[s] >= 0 && pinned_[s] != val) contradictory_ = true;
    pinned_[s] = val;
  }

  void restrict(int obj, int elem, std::vector<int> vals) {
    int s = slot_of(obj, elem);
    allowed_[s] = std::move(vals);
    restricted_[s] = 1;
  }

  // Runs the search; emit returns false to stop early.
  void run(const std::function<bool(const std::vector<int>&)>& emit) {
    if (contradictory_) return;
    emit_ = &emit;
    stopped_ = false;
    dfs(0);
    emit_ = nullptr;
  }

 private:
  struct Constraint {
    int in_slot;   // element of X(target m)
    int out_slot;  // its image under X(m)
    int mor;
  };

  bool admissible(int s, int v) const {
    if (v < 0 || v >= y_->card(slot_obj_[s])) return false;
    if (pinned_[s] >= 0 && pinned_[s] != v) return false;
    if (restricted_[s] &&
        std::find(allowed_[s].begin(), allowed_[s].end(), v) == allowed_[s].end())
      return false;
    return true;
  }

  // Assign slot s to v and propagate through every constraint it drives;
  // records touched slots on the trail. Returns false on any conflict.
  bool assign(int s, int v, std::vector<int>& trail) {
    if (value_[s] >= 0) return value_[s] == v;
    if (!admissible(s, v)) return false;
    budget_.charge("map enumeration");
    value_[s] = v;
    trail.push_back(s);
    for (const Constraint& c : out_of_[s])
      if (!assign(c.out_slot, y_->act(c.mor, v), trail)) return false;
    for (const Constraint& c : in_of_[s]) {
      int in = value_[c.in_slot];
      if (in >= 0 && y_->act(c.mor, in) != v) return false;
    }
    return true;
  }

  void undo(std::vector<int>& trail) {
    for (int s : trail) value_[s] = -1;
    trail.clear();
  }

  void dfs(std::size_t k) {
    if (stopped_) return;
    while (k < order_.size() && value_[order_[k]] >= 0) ++k;
    if (k == order_.size()) {
      if (!(*emit_)(value_)) stopped_ = true;
      return;
    }
    const int s = order_[k];
    const int card = y_->card(slot_obj_[s]);
    std::vector<int> trail;
    auto try_value = [&](int v) {
      if (assign(s, v, trail)) dfs(k + 1);
      undo(trail);
    };
    if (pinned_[s] >= 0) {
      try_value(pinned_[s]);
      return;
    }
    if (restricted_[s]) {
      for (int v : allowed_[s]) {
        if (stopped_) return;
        try_value(v);
      }
      return;
    }
    for (int v = 0; v < card; ++v) {
      if (stopped_) return;
      try_value(v);
    }
  }

  PresheafPtr x_, y_;
  Budget& budget_;
  std::vector<int> offset_;
  int total_ = 0;
  std::vector<int> value_;
  std::vector<int> pinned_;
  std::vector<std::vector<int>> allowed_;
  std::vector<char> restricted_;
  std::vector<int> slot_obj_;
  std::vector<std::vector<Constraint>> out_of_;
  std::vector<std::vector<Constraint>> in_of_;
  std::vector<int> order_;
  const std::function<bool(const std::vector<int>&)>* emit_ = nullptr;
  bool stopped_ = false;
  bool contradictory_ = false;
};

PresheafMorphism morphism_from_flat(const PresheafPtr& x, const PresheafPtr& y,
                                    const std::vector<int>& flat) {
  const int nobj = x->base()->object_count();
  std::vector<std::vector<int>> comps(nobj);
  int k = 0;
  for (int o = 0; o < nobj; ++o) {
    comps[o].resize(x->card(o));
    for (int e = 0; e < x->card(o); ++e) comps[o][e] = flat[k++];
  }
  return PresheafMorphism(x, y, std::move(comps));
}

}  // namespace

std::vector<PresheafMorphism> enumerate_maps(const PresheafPtr& x, const PresheafPtr& y,
                                             Budget& budget) {
  return enumerate_maps_pinned(x, y, {}, budget);
}

std::vector<PresheafMorphism> enumerate_maps_pinned(const PresheafPtr& x, const PresheafPtr& y,
                                                    const std::vector<Pin>& pins,
                                                    Budget& budget) {
  if (x->base().get() != y->base().get())
    throw ShapeError("enumerate_maps: presheaves on different bases");
  std::vector<PresheafMorphism> out;
  MapSearch search(x, y, budget);
  for (const auto& p : pins) search.pin(p.obj, p.elem, p.value);
  search.run([&](const std::vector<int>& flat) {
    out.push_back(morphism_from_flat(x, y, flat));
    return true;
  });
  std::sort(out.begin(), out.end(), [](const PresheafMorphism& a, const PresheafMorphism& b) {
    return a.components() < b.components();
  });
  return out;
}

std::optional<PresheafMorphism> find_lift(const LiftingProblem& p, Budget& budget) {
  const auto& i = p.left;
  const auto& f = p.right;
  if (!(i.source() == p.top.source()) || !(i.target() == p.bottom.source()) ||
      !(f.source() == p.top.target()) || !(f.target() == p.bottom.target()))
    throw ShapeError("find_lift: square endpoints do not match");
  const PresheafPtr b = i.target_ptr();
  const PresheafPtr x = p.top.target_ptr();
  MapSearch search(b, x, budget);
  const int nobj = b->base()->object_count();
  // d.i = top pins d on the image of i.
  for (int o = 0; o < nobj; ++o)
    for (int a = 0; a < i.source().card(o); ++a) search.pin(o, i.comp(o, a), p.top.comp(o, a));
  // f.d = bottom restricts each slot to a fiber of f.
  for (int o = 0; o < nobj; ++o)
    for (int e = 0; e < b->card(o); ++e) {
      std::vector<int> fiber;
      const int want = p.bottom.comp(o, e);
      for (int v = 0; v < x->card(o); ++v)
        if (f.comp(o, v) == want) fiber.push_back(v);
      search.restrict(o, e, std::move(fiber));
    }
  std::optional<PresheafMorphism> found;
  search.run([&](const std::vector<int>& flat) {
    found = morphism_from_flat(b, x, flat);
    return false;
  });
  return found;
}

bool has_rlp(const PresheafMorphism& f, const std::vector<PresheafMorphism>& gens,
             Budget& budget) {
  const PresheafPtr x = f.source_ptr();
  const PresheafPtr y = f.target_ptr();
  for (const auto& g : gens) {
    if (g.source().base().get() != x->base().get())
      throw ShapeError("has_rlp: generator on a different base");
    auto tops = enumerate_maps(g.source_ptr(), x, budget);
    for (const auto& u : tops) {
      // Enumerate bottoms v with v.g = f.u; they are pinned on the image of g.
      const PresheafMorphism fu = compose(f, u);
      MapSearch bsearch(g.target_ptr(), y, budget);
      const int nobj = x->base()->object_count();
      for (int o = 0; o < nobj; ++o)
        for (int a = 0; a < g.source().card(o); ++a) bsearch.pin(o, g.comp(o, a), fu.comp(o, a));
      bool all_lift = true;
      bsearch.run([&](const std::vector<int>& flat) {
        PresheafMorphism v = morphism_from_flat(g.target_ptr(), y, flat);
        LiftingProblem square{g, f, u, v};
        if (!find_lift(square, budget).has_value()) {
          all_lift = false;
          return false;
        }
        return true;
      });
      if (!all_lift) return false;
    }
  }
  return true;
}

// --- colimits ----------------------------------------------------------------

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

// Disjoint union of `parts` quotiented objectwise by the given identifications.
// Each identification relates (part, object, element) with (part', object, element').
struct Identification {
  int part_a, elem_a;
  int part_b, elem_b;
  int obj;
};

static ColimitResult amalgam(CatPtr base, const std::vector<Presheaf>& parts,
                             const std::vector<Identification>& ids) {
  const int nobj = base->object_count();
  const int nparts = static_cast<int>(parts.size());
  // Offsets of each part inside the disjoint union, per object.
  std::vector<std::vector<int>> off(nobj, std::vector<int>(nparts + 1, 0));
  for (int o = 0; o < nobj; ++o)
    for (int p = 0; p < nparts; ++p) off[o][p + 1] = off[o][p] + parts[p].card(o);

  std::vector<UnionFind> uf;
  uf.reserve(nobj);
  for (int o = 0; o < nobj; ++o) uf.emplace_back(off[o][nparts]);
  for (const auto& id : ids)
    uf[id.obj].unite(off[id.obj][id.part_a] + id.elem_a, off[id.obj][id.part_b] + id.elem_b);

  // Number classes in increasing root order; representatives are minimal.
  std::vector<std::vector<int>> class_of(nobj);
  std::vector<int> cards(nobj, 0);
  std::vector<std::vector<int>> rep(nobj);  // class -> union element
  for (int o = 0; o < nobj; ++o) {
    class_of[o].assign(off[o][nparts], -1);
    for (int e = 0; e < off[o][nparts]; ++e) {
      int r = uf[o].find(e);
      if (class_of[o][r] < 0) {
        class_of[o][r] = cards[o]++;
        rep[o].push_back(r);
      }
      class_of[o][e] = class_of[o][r];
    }
  }

  auto part_of = [&](int o, int e) {
    int p = 0;
    while (off[o][p + 1] <= e) ++p;
    return p;
  };

  // Actions descend to classes; the identifications are closed under the
  // diagram actions, so any representative gives the same answer.
  const auto& cat = *base;
  std::vector<std::vector<int>> actions(cat.morphism_count());
  for (int m = 0; m < cat.morphism_count(); ++m) {
    const int src = cat.source(m), tgt = cat.target(m);
    actions[m].resize(cards[tgt]);
    for (int c = 0; c < cards[tgt]; ++c) {
      int e = rep[tgt][c];
      int p = part_of(tgt, e);
      int inside = e - off[tgt][p];
      int img = parts[p].act(m, inside);
      actions[m][c] = class_of[src][off[src][p] + img];
    }
  }

  Presheaf object(base, cards, std::move(actions));
  PresheafPtr obj_ptr = share(std::move(object));

  std::vector<PresheafMorphism> legs;
  legs.reserve(nparts);
  for (int p = 0; p < nparts; ++p) {
    std::vector<std::vector<int>> comps(nobj);
    for (int o = 0; o < nobj; ++o) {
      comps[o].resize(parts[p].card(o));
      for (int e = 0; e < parts[p].card(o); ++e) comps[o][e] = class_of[o][off[o][p] + e];
    }
    legs.emplace_back(share(parts[p]), obj_ptr, std::move(comps));
  }
  return ColimitResult{*obj_ptr, std::move(legs)};
}

ColimitResult finite_colimit(const Diagram& d) {
  if (!d.shape) throw ShapeError("finite_colimit: missing shape");
  if (static_cast<int>(d.objects.size()) != d.shape->object_count())
    throw ShapeError("finite_colimit: one presheaf per shape object required");
  if (static_cast<int>(d.arrows.size()) != d.shape->morphism_count())
    throw ShapeError("finite_colimit: one morphism per shape arrow required");
  if (d.objects.empty())
    throw ShapeError("finite_colimit: empty diagram; use initial_presheaf directly");
  CatPtr base = d.objects.front().base();
  for (const auto& p : d.objects)
    if (p.base().get() != base.get()) throw ShapeError("finite_colimit: mixed bases");
  for (int m = 0; m < d.shape->morphism_count(); ++m) {
    const auto& a = d.arrows[m];
    if (!(a.source() == d.objects[d.shape->source(m)]) ||
        !(a.target() == d.objects[d.shape->target(m)]))
      throw ShapeError("finite_colimit: arrow " + d.shape->morphism_name(m) +
                       " does not match its endpoints");
  }
  // Coproduct of the objects, coequalized along every arrow of the shape.
  std::vector<Identification> ids;
  for (int m = 0; m < d.shape->morphism_count(); ++m) {
    const int s = d.shape->source(m), t = d.shape->target(m);
    for (int o = 0; o < base->object_count(); ++o)
      for (int e = 0; e < d.objects[s].card(o); ++e)
        ids.push_back({s, e, t, d.arrows[m].comp(o, e), o});
  }
  return amalgam(base, d.objects, ids);
}

ColimitResult coproduct(CatPtr base, const std::vector<Presheaf>& parts) {
  for (const auto& p : parts)
    if (p.base().get() != base.get()) throw ShapeError("coproduct: mixed bases");
  return amalgam(base, parts, {});
}

ColimitResult pushout(const PresheafMorphism& f, const PresheafMorphism& g) {
  if (!(f.source() == g.source())) throw ShapeError("pushout: span legs must share a source");
  CatPtr base = f.source().base();
  std::vector<Presheaf> parts{f.target(), g.target()};
  std::vector<Identification> ids;
  for (int o = 0; o < base->object_count(); ++o)
    for (int e = 0; e < f.source().card(o); ++e)
      ids.push_back({0, f.comp(o, e), 1, g.comp(o, e), o});
  return amalgam(base, parts, ids);
}

ColimitResult coequalizer(const PresheafMorphism& f, const PresheafMorphism& g) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()))
    throw ShapeError("coequalizer: pair must be parallel");
  CatPtr base = f.source().base();
  std::vector<Presheaf> parts{f.target()};
  std::vector<Identification> ids;
  for (int o = 0; o < base->object_count(); ++o)
    for (int e = 0; e < f.source().card(o); ++e)
      ids.push_back({0, f.comp(o, e), 0, g.comp(o, e), o});
  return amalgam(base, parts, ids);
}

std::vector<int> subcoproduct_support(const PresheafMorphism& f,
                                      const std::vector<PresheafMorphism>& injections) {
  const int nobj = f.source().base()->object_count();
  std::vector<int> support;
  for (std::size_t i = 0; i < injections.size(); ++i) {
    const auto& leg = injections[i];
    if (!(leg.target() == f.target()))
      throw ShapeError("subcoproduct_support: injection target mismatch");
    bool hit = false;
    for (int o = 0; o < nobj && !hit; ++o) {
      std::vector<char> in_leg(f.target().card(o), 0);
      for (int e = 0; e < leg.source().card(o); ++e) in_leg[leg.comp(o, e)] = 1;
      for (int e = 0; e < f.source().card(o) && !hit; ++e)
        if (in_leg[f.comp(o, e)]) hit = true;
    }
    if (hit) support.push_back(static_cast<int>(i));
  }
  return support;
}

PresheafMorphism colimit_induced(const ColimitResult& col,
                                 const std::vector<PresheafMorphism>& cocone) {
  if (cocone.size() != col.legs.size())
    throw ShapeError("colimit_induced: one cocone component per leg required");
  const auto apex = share(col.object);
  const int nobj = col.object.base()->object_count();
  PresheafPtr target;
  for (const auto& m : cocone) {
    if (!target) target = m.target_ptr();
    if (!(m.target() == *target)) throw ShapeError("colimit_induced: mixed cocone targets");
  }
  if (!target) throw ShapeError("colimit_induced: empty cocone");
  std::vector<std::vector<int>> comps(nobj);
  for (int o = 0; o < nobj; ++o) comps[o].assign(apex->card(o), -1);
  for (std::size_t i = 0; i < col.legs.size(); ++i) {
    const auto& leg = col.legs[i];
    for (int o = 0; o < nobj; ++o)
      for (int e = 0; e < leg.source().card(o); ++e) {
        int cls = leg.comp(o, e);
        int val = cocone[i].comp(o, e);
        if (comps[o][cls] >= 0 && comps[o][cls] != val)
          throw ShapeError("colimit_induced: cocone does not respect identifications");
        comps[o][cls] = val;
      }
  }
  for (int o = 0; o < nobj; ++o)
    for (int v : comps[o])
      if (v < 0) throw ShapeError("colimit_induced: colimit has cells outside the legs");
  return PresheafMorphism(apex, target, std::move(comps));
}

ProductResult presheaf_product(CatPtr base, const std::vector<Presheaf>& factors) {
  const int nobj = base->object_count();
  const int nf = static_cast<int>(factors.size());
  for (const auto& p : factors)
    if (p.base().get() != base.get()) throw ShapeError("presheaf_product: mixed bases");
  // Tuples in row-major order, last factor fastest.
  std::vector<int> cards(nobj, 1);
  for (int o = 0; o < nobj; ++o)
    for (const auto& p : factors) cards[o] *= p.card(o);
  auto decode = [&](int o, int t) {
    std::vector<int> coord(nf);
    for (int i = nf - 1; i >= 0; --i) {
      coord[i] = t % factors[i].card(o);
      t /= factors[i].card(o);
    }
    return coord;
  };
  auto encode = [&](int o, const std::vector<int>& coord) {
    int t = 0;
    for (int i = 0; i < nf; ++i) t = t * factors[i].card(o) + coord[i];
    return t;
  };
  std::vector<std::vector<int>> actions(base->morphism_count());
  for (int m = 0; m < base->morphism_count(); ++m) {
    const int src = base->source(m), tgt = base->target(m);
    actions[m].resize(cards[tgt]);
    for (int t = 0; t < cards[tgt]; ++t) {
      auto coord = decode(tgt, t);
      for (int i = 0; i < nf; ++i) coord[i] = factors[i].act(m, coord[i]);
      actions[m][t] = encode(src, coord);
    }
  }
  Presheaf object(base, cards, std::move(actions));
  PresheafPtr obj_ptr = share(std::move(object));
  std::vector<PresheafMorphism> projections;
  for (int i = 0; i < nf; ++i) {
    std::vector<std::vector<int>> comps(nobj);
    for (int o = 0; o < nobj; ++o) {
      comps[o].resize(obj_ptr->card(o));
      for (int t = 0; t < obj_ptr->card(o); ++t) comps[o][t] = decode(o, t)[i];
    }
    projections.emplace_back(obj_ptr, share(factors[i]), std::move(comps));
  }
  return ProductResult{*obj_ptr, std::move(projections)};
}

}  // namespace finmodel::fincat
