#include "finmodel/hocat.hpp"

#include <algorithm>

namespace finmodel::hocat {

using fincat::Budget;
using fincat::colimit_induced;
using fincat::ColimitResult;
using fincat::compose;
using fincat::coproduct;
using fincat::enumerate_maps;
using fincat::find_lift;
using fincat::LiftingProblem;
using fincat::ShapeError;
using fincat::share;

PresheafMorphism section_of_trivial_fibration(const PresheafMorphism& p,
                                              const model::ModelInstance& m) {
  Budget b(m.budget);
  auto initial = share(fincat::initial_presheaf(m.base));
  auto to_total = enumerate_maps(initial, p.source_ptr(), b).front();
  auto to_base = enumerate_maps(initial, p.target_ptr(), b).front();
  LiftingProblem square{to_base, p, to_total, PresheafMorphism::identity(p.target_ptr())};
  auto lift = find_lift(square, b);
  if (!lift)
    throw ShapeError("section_of_trivial_fibration: no section found");
  return *lift;
}

const model::FullReplacement& HoCalc::replace(const Presheaf& x) {
  auto key = x.canonical_key();
  auto it = replacements_.find(key);
  if (it == replacements_.end())
    it = replacements_.emplace(key, model::full_replacement(x, m_)).first;
  return it->second;
}

const model::CylinderData& HoCalc::cylinder_of(const Presheaf& source) {
  auto key = source.canonical_key();
  auto it = cylinders_.find(key);
  if (it == cylinders_.end()) it = cylinders_.emplace(key, model::cylinder(source, m_)).first;
  return it->second;
}

bool HoCalc::fibrant(const Presheaf& x) {
  auto key = x.canonical_key();
  auto it = fibrancy_.find(key);
  if (it == fibrancy_.end()) it = fibrancy_.emplace(key, model::is_fibrant(x, m_)).first;
  return it->second;
}

bool HoCalc::homotopic(const PresheafMorphism& f, const PresheafMorphism& g) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()))
    throw ShapeError("homotopic: maps must be parallel");
  if (!fibrant(f.target())) throw ShapeError("homotopic: target must be fibrant");
  const auto& cyl = cylinder_of(f.source());
  Budget b(m_.budget);
  return model::left_homotopy_witness(f, g, cyl, b).has_value();
}

std::vector<PresheafMorphism> HoCalc::maps_up_to_homotopy(const PresheafPtr& source,
                                                          const PresheafPtr& target) {
  Budget b(m_.budget);
  auto maps = enumerate_maps(source, target, b);
  std::vector<PresheafMorphism> reps;
  for (auto& f : maps) {
    bool fresh = true;
    for (const auto& r : reps)
      if (homotopic(f, r)) {
        fresh = false;
        break;
      }
    if (fresh) reps.push_back(std::move(f));
  }
  return reps;
}

const HoHomSet& HoCalc::ho_hom(const Presheaf& x, const Presheaf& y) {
  auto key = std::make_pair(x.canonical_key(), y.canonical_key());
  auto it = homsets_.find(key);
  if (it != homsets_.end()) return it->second;
  auto rx = share(replace(x).object);
  auto ry = share(replace(y).object);
  HoHomSet hom{rx, ry, maps_up_to_homotopy(rx, ry)};
  return homsets_.emplace(std::move(key), std::move(hom)).first->second;
}

int HoCalc::class_of(const HoHomSet& hom, const PresheafMorphism& map) {
  for (std::size_t i = 0; i < hom.classes.size(); ++i)
    if (homotopic(map, hom.classes[i])) return static_cast<int>(i);
  throw ShapeError("class_of: map outside the listed classes");
}

PresheafMorphism HoCalc::project_map(const PresheafMorphism& f) {
  return model::replace_map(f, replace(f.source()), replace(f.target()), m_);
}

bool HoCalc::weq_map(const PresheafMorphism& f) {
  auto rf = project_map(f);
  const auto& back = ho_hom(f.target(), f.source());
  auto id_src = PresheafMorphism::identity(rf.source_ptr());
  auto id_tgt = PresheafMorphism::identity(rf.target_ptr());
  for (const auto& g : back.classes)
    if (homotopic(compose(g, rf), id_src) && homotopic(compose(rf, g), id_tgt)) return true;
  return false;
}

bool HoCalc::weq_objects(const Presheaf& x, const Presheaf& y) {
  const auto& fwd = ho_hom(x, y);
  const auto& back = ho_hom(y, x);
  if (fwd.classes.empty() || back.classes.empty())
    return fwd.source_r->total_cells() == 0 && fwd.target_r->total_cells() == 0;
  auto id_x = PresheafMorphism::identity(fwd.source_r);
  auto id_y = PresheafMorphism::identity(fwd.target_r);
  for (const auto& a : fwd.classes)
    for (const auto& b : back.classes)
      if (homotopic(compose(b, a), id_x) && homotopic(compose(a, b), id_y)) return true;
  return false;
}

HoCalc::FamilyResult HoCalc::ho_product(const std::vector<Presheaf>& factors) {
  std::vector<Presheaf> replaced;
  replaced.reserve(factors.size());
  for (const auto& f : factors) replaced.push_back(replace(f).object);
  auto prod = fincat::presheaf_product(m_.base, replaced);
  auto cof = model::replacement(prod.object, model::ReplacementKind::Cofibrant, m_);
  FamilyResult out{cof.object, {}};
  for (const auto& p : prod.projections) out.structure.push_back(compose(p, cof.comparison));
  return out;
}

HoCalc::FamilyResult HoCalc::ho_coproduct(const std::vector<Presheaf>& parts) {
  std::vector<Presheaf> replaced;
  replaced.reserve(parts.size());
  for (const auto& p : parts) replaced.push_back(replace(p).object);
  auto cop = coproduct(m_.base, replaced);
  auto fib = model::replacement(cop.object, model::ReplacementKind::Fibrant, m_);
  FamilyResult out{fib.object, {}};
  for (const auto& inj : cop.legs) out.structure.push_back(compose(fib.comparison, inj));
  return out;
}

PushoutSquare HoCalc::homotopy_pushout(const PresheafMorphism& f, const PresheafMorphism& g) {
  if (!(f.source() == g.source())) throw ShapeError("homotopy_pushout: span legs share a source");
  auto tf = model::factorize(f, model::FactorKind::CofTrivFib, m_);
  auto tg = model::factorize(g, model::FactorKind::CofTrivFib, m_);
  if (!tf.terminated) throw model::CapExhausted(std::move(tf));
  if (!tg.terminated) throw model::CapExhausted(std::move(tg));
  auto po = fincat::pushout(tf.left(), tg.left());
  return PushoutSquare{po.object, tf.left(),  tg.left(), tf.right(),
                       tg.right(), po.legs[0], po.legs[1]};
}

std::vector<PresheafMorphism> HoCalc::pushout_factorizations(const PushoutSquare& square,
                                                             const PresheafMorphism& u,
                                                             const PresheafMorphism& w) {
  if (!fibrant(u.target())) throw ShapeError("pushout_factorizations: target must be fibrant");
  auto left_want = compose(u, square.res_left);
  auto right_want = compose(w, square.res_right);
  std::vector<PresheafMorphism> out;
  for (auto& t : maps_up_to_homotopy(share(square.object), u.target_ptr())) {
    if (homotopic(compose(t, square.glue_left), left_want) &&
        homotopic(compose(t, square.glue_right), right_want))
      out.push_back(std::move(t));
  }
  return out;
}

WeakCoequalizer HoCalc::weak_coequalizer(const PresheafMorphism& f, const PresheafMorphism& g) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()))
    throw ShapeError("weak_coequalizer: pair must be parallel");
  auto sum = coproduct(m_.base, {f.source(), f.target()});
  auto id_b = PresheafMorphism::identity(f.target_ptr());
  auto first = colimit_induced(sum, {f, id_b});
  auto second = colimit_induced(sum, {g, id_b});
  auto square = homotopy_pushout(first, second);
  auto section = section_of_trivial_fibration(square.res_left, m_);
  return WeakCoequalizer{square, compose(square.glue_left, section)};
}

WeakColimit HoCalc::standard_weak_colimit(const fincat::Diagram& d) {
  auto object_sum = coproduct(m_.base, d.objects);
  // one summand per shape morphism, carrying the arrow's source object
  std::vector<Presheaf> arrow_sources;
  for (int e = 0; e < d.shape->morphism_count(); ++e)
    arrow_sources.push_back(d.objects[d.shape->source(e)]);
  auto arrow_sum = coproduct(m_.base, arrow_sources);
  std::vector<PresheafMorphism> first_legs, second_legs;
  for (int e = 0; e < d.shape->morphism_count(); ++e) {
    first_legs.push_back(object_sum.legs[d.shape->source(e)]);
    second_legs.push_back(compose(object_sum.legs[d.shape->target(e)], d.arrows[e]));
  }
  auto pair_first = colimit_induced(arrow_sum, first_legs);
  auto pair_second = colimit_induced(arrow_sum, second_legs);
  auto wc = weak_coequalizer(pair_first, pair_second);
  std::vector<PresheafMorphism> cocone;
  for (const auto& leg : object_sum.legs) cocone.push_back(compose(wc.through, leg));
  return WeakColimit{wc.square.object, std::move(cocone), wc.square,
                     std::move(object_sum), std::move(arrow_sum), pair_first, pair_second};
}

Comparison HoCalc::comparison_morphism(const WeakColimit& weak,
                                       const fincat::ColimitResult& strict,
                                       const fincat::Diagram& d) {
  (void)d;
  auto q = colimit_induced(weak.object_sum, strict.legs);
  ColimitResult glue{weak.square.object, {weak.square.glue_left, weak.square.glue_right}};
  auto p = colimit_induced(
      glue, {compose(q, weak.square.res_left), compose(q, weak.square.res_right)});
  bool exact = compose(p, weak.square.glue_left) == compose(q, weak.square.res_left) &&
               compose(p, weak.square.glue_right) == compose(q, weak.square.res_right);
  return Comparison{p, exact};
}

CanonicalImage HoCalc::canonical_image(const Presheaf& k, const std::vector<Presheaf>& index) {
  CanonicalImage img;
  img.index_objects = index;
  const int n = static_cast<int>(index.size());
  for (int i = 0; i < n; ++i) img.hom_to_target.push_back(ho_hom(index[i], k));
  img.arrows.resize(n);
  img.precompose.resize(n);
  for (int i = 0; i < n; ++i) {
    img.arrows[i].reserve(n);
    img.precompose[i].resize(n);
    for (int j = 0; j < n; ++j) {
      img.arrows[i].push_back(ho_hom(index[i], index[j]));
      const auto& ts = img.arrows[i][j].classes;
      img.precompose[i][j].resize(ts.size());
      for (std::size_t t = 0; t < ts.size(); ++t) {
        const auto& from_j = img.hom_to_target[j].classes;
        img.precompose[i][j][t].resize(from_j.size());
        for (std::size_t c = 0; c < from_j.size(); ++c)
          img.precompose[i][j][t][c] = class_of(img.hom_to_target[i], compose(from_j[c], ts[t]));
      }
    }
  }
  return img;
}

namespace {

// All tuples of functions (one per index object) from hom(A_j, A) classes to
// hom(A_j, K) classes, walked by odometer.
struct TransformationSpace {
  std::vector<int> domain_sizes;
  std::vector<int> codomain_sizes;
  std::vector<std::vector<int>> current;  // current[j][c]

  bool start() {
    current.clear();
    for (std::size_t j = 0; j < domain_sizes.size(); ++j) {
      if (domain_sizes[j] > 0 && codomain_sizes[j] == 0) return false;
      current.emplace_back(domain_sizes[j], 0);
    }
    return true;
  }

  bool advance() {
    for (std::size_t j = 0; j < current.size(); ++j)
      for (auto& v : current[j]) {
        if (++v < codomain_sizes[j]) return true;
        v = 0;
      }
    return false;
  }
};

}  // namespace

FullFaithfulReport HoCalc::check_index_full_faithful(const std::vector<Presheaf>& index,
                                                     const std::vector<Presheaf>& sample) {
  FullFaithfulReport report;
  const int n = static_cast<int>(index.size());
  for (const auto& k : sample) {
    auto img_k = canonical_image(k, index);
    for (int i = 0; i < n; ++i) {
      auto img_a = canonical_image(index[i], index);
      // postcomposition tables E(f') for every class f': A_i -> K
      const auto& candidates = img_k.hom_to_target[i].classes;
      std::vector<std::vector<std::vector<int>>> realized;  // per candidate: [j][c]
      for (const auto& f : candidates) {
        std::vector<std::vector<int>> table(n);
        for (int j = 0; j < n; ++j) {
          const auto& homs = img_a.hom_to_target[j].classes;
          table[j].resize(homs.size());
          for (std::size_t c = 0; c < homs.size(); ++c)
            table[j][c] = class_of(img_k.hom_to_target[j], compose(f, homs[c]));
        }
        realized.push_back(std::move(table));
      }
      // faithfulness: distinct classes have distinct tables
      for (std::size_t a = 0; a < realized.size(); ++a)
        for (std::size_t b = a + 1; b < realized.size(); ++b)
          if (realized[a] == realized[b]) {
            report.faithful = false;
            report.violations.push_back("two distinct classes share an image");
          }
      // fullness: every natural family of functions is realized
      TransformationSpace space;
      for (int j = 0; j < n; ++j) {
        space.domain_sizes.push_back(static_cast<int>(img_a.hom_to_target[j].classes.size()));
        space.codomain_sizes.push_back(static_cast<int>(img_k.hom_to_target[j].classes.size()));
      }
      if (!space.start()) continue;
      do {
        // naturality over every arrow class t: A_j -> A_j'
        bool natural = true;
        for (int j = 0; j < n && natural; ++j)
          for (int j2 = 0; j2 < n && natural; ++j2)
            for (std::size_t t = 0; t < img_a.arrows[j][j2].classes.size() && natural; ++t)
              for (std::size_t c = 0; c < img_a.hom_to_target[j2].classes.size() && natural; ++c) {
                int lhs = space.current[j][img_a.precompose[j][j2][t][c]];
                int rhs = img_k.precompose[j][j2][t][space.current[j2][c]];
                natural = lhs == rhs;
              }
        if (!natural) continue;
        ++report.transformations_checked;
        bool found = false;
        for (const auto& table : realized)
          if (table == space.current) {
            found = true;
            break;
          }
        if (!found) {
          report.full = false;
          report.violations.push_back("unrealized natural transformation");
        }
      } while (space.advance());
    }
  }
  return report;
}

bool HoCalc::phantom_equivalent(const Presheaf& x, const Presheaf& l,
                                const PresheafMorphism& f_rep, const PresheafMorphism& g_rep,
                                const std::vector<Presheaf>& index) {
  if (!(f_rep.source() == g_rep.source()) || !(f_rep.target() == g_rep.target()))
    throw ShapeError("phantom_equivalent: pair must be parallel");
  (void)l;
  for (const auto& a : index) {
    const auto& probes = ho_hom(a, x);
    for (const auto& h : probes.classes)
      if (!homotopic(compose(f_rep, h), compose(g_rep, h))) return false;
  }
  return true;
}

PhantomPair HoCalc::weakly_initial_phantom_pair(const Presheaf& x,
                                                const std::vector<Presheaf>& index) {
  const auto& rx = replace(x);
  auto rx_ptr = share(rx.object);
  std::vector<Presheaf> probe_sources;
  std::vector<PresheafMorphism> probe_reps;
  for (const auto& a : index) {
    const auto& hom = ho_hom(a, x);
    for (const auto& h : hom.classes) {
      probe_sources.push_back(*hom.source_r);
      probe_reps.push_back(h);
    }
  }
  PresheafMorphism p = [&] {
    if (probe_reps.empty()) {
      Budget b(m_.budget);
      auto initial = share(fincat::initial_presheaf(m_.base));
      return enumerate_maps(initial, rx_ptr, b).front();
    }
    auto sum = coproduct(m_.base, probe_sources);
    return colimit_induced(sum, probe_reps);
  }();
  auto square = homotopy_pushout(p, p);
  auto s_left = section_of_trivial_fibration(square.res_left, m_);
  auto s_right = section_of_trivial_fibration(square.res_right, m_);
  auto first0 = compose(square.glue_left, s_left);    // R x -> E
  auto second0 = compose(square.glue_right, s_right);  // R x -> E
  // transport into representatives R x -> R E
  const auto& re = replace(square.object);
  auto to_re = compose(re.to_object, section_of_trivial_fibration(re.from_cofibrant, m_));
  PhantomPair pair{square.object, compose(to_re, first0), compose(to_re, second0), false};
  pair.phantom_equivalent = phantom_equivalent(x, square.object, pair.first, pair.second, index);
  return pair;
}

PhantomInitialityReport HoCalc::certify_phantom_initiality(const Presheaf& x,
                                                           const PhantomPair& pair,
                                                           const std::vector<Presheaf>& index,
                                                           const std::vector<Presheaf>& targets) {
  PhantomInitialityReport report;
  for (const auto& l : targets) {
    const auto& hom_xl = ho_hom(x, l);
    const auto& hom_el = ho_hom(pair.target, l);
    for (const auto& phi : hom_xl.classes)
      for (const auto& psi : hom_xl.classes) {
        if (!phantom_equivalent(x, l, phi, psi, index)) continue;
        ++report.pairs_checked;
        bool factored = false;
        for (const auto& t : hom_el.classes) {
          if (homotopic(compose(t, pair.first), phi) &&
              homotopic(compose(t, pair.second), psi)) {
            factored = true;
            break;
          }
        }
        if (!factored) {
          report.initial = false;
          report.notes.push_back("unfactored phantom pair into a target with " +
                                 std::to_string(l.total_cells()) + " cells");
        }
      }
  }
  return report;
}

}  // namespace finmodel::hocat
