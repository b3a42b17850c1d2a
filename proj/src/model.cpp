#include "finmodel/model.hpp"

#include <algorithm>

namespace finmodel::model {

using fincat::coproduct;
using fincat::LiftingProblem;
using fincat::PresheafMorphism;
using fincat::share;
using fincat::ShapeError;

CapExhausted::CapExhausted(FactorizationTrace trace)
    : std::runtime_error("iteration cap exhausted after " +
                         std::to_string(trace.steps_used) + " steps"),
      trace_(std::move(trace)) {}

namespace {

// Enumerate bottoms v: T -> B with v.h = f.u, pinned on the image of h.
std::vector<PresheafMorphism> closing_bottoms(const PresheafMorphism& h,
                                              const PresheafMorphism& f,
                                              const PresheafMorphism& u, Budget& budget) {
  const PresheafMorphism fu = fincat::compose(f, u);
  std::vector<fincat::Pin> pins;
  const int nobj = h.source().base()->object_count();
  for (int o = 0; o < nobj; ++o)
    for (int a = 0; a < h.source().card(o); ++a)
      pins.push_back({o, h.comp(o, a), fu.comp(o, a)});
  return enumerate_maps_pinned(h.target_ptr(), f.target_ptr(), pins, budget);
}

// Glue cod(h) onto the working object along u': dom(h) -> W.
// Returns (W -> W', cod(h) -> W').
std::pair<PresheafMorphism, PresheafMorphism> attach_cell(const PresheafMorphism& h,
                                                          const PresheafMorphism& u_into_w) {
  auto po = fincat::pushout(u_into_w, h);
  return {po.legs[0], po.legs[1]};
}

}  // namespace

std::pair<PresheafMorphism, PresheafMorphism> soa_step(const PresheafMorphism& f,
                                                       const std::vector<PresheafMorphism>& gens,
                                                       SoaMode mode, Budget& budget) {
  const PresheafPtr a = f.source_ptr();

  if (mode == SoaMode::Naive) {
    // One simultaneous colimit over all spans (u, h) admitting a closing v.
    struct Span {
      const PresheafMorphism* gen;
      PresheafMorphism u;
      PresheafMorphism v;
    };
    std::vector<Span> spans;
    for (const auto& h : gens) {
      for (auto& u : enumerate_maps(h.source_ptr(), a, budget)) {
        auto vs = closing_bottoms(h, f, u, budget);
        if (!vs.empty()) spans.push_back({&h, std::move(u), std::move(vs.front())});
      }
    }
    if (spans.empty()) return {PresheafMorphism::identity(a), f};
    // Pushout of the coproduct of generator sources along the induced map to A.
    CatPtr base = a->base();
    std::vector<Presheaf> sources, targets;
    for (const auto& s : spans) {
      sources.push_back(s.gen->source());
      targets.push_back(s.gen->target());
    }
    auto src_cop = coproduct(base, sources);
    auto tgt_cop = coproduct(base, targets);
    const int nobj = base->object_count();
    // induced: coprod sources -> A  and  coprod sources -> coprod targets
    std::vector<std::vector<int>> to_a(nobj), to_t(nobj);
    for (int o = 0; o < nobj; ++o) {
      to_a[o].resize(src_cop.object.card(o));
      to_t[o].resize(src_cop.object.card(o));
    }
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const auto& inj_s = src_cop.legs[i];
      const auto& inj_t = tgt_cop.legs[i];
      for (int o = 0; o < nobj; ++o)
        for (int e = 0; e < spans[i].gen->source().card(o); ++e) {
          to_a[o][inj_s.comp(o, e)] = spans[i].u.comp(o, e);
          to_t[o][inj_s.comp(o, e)] = inj_t.comp(o, spans[i].gen->comp(o, e));
        }
    }
    auto src_ptr = share(src_cop.object);
    auto tgt_ptr = share(tgt_cop.object);
    PresheafMorphism induced_a(src_ptr, a, std::move(to_a));
    PresheafMorphism induced_t(src_ptr, tgt_ptr, std::move(to_t));
    auto po = fincat::pushout(induced_a, induced_t);
    const PresheafMorphism& alpha = po.legs[0];
    const PresheafMorphism& from_targets = po.legs[1];
    // right leg induced by f on the A part and the chosen v on each cell.
    auto f0 = share(po.object);
    std::vector<std::vector<int>> beta(nobj);
    for (int o = 0; o < nobj; ++o) beta[o].assign(f0->card(o), -1);
    for (int o = 0; o < nobj; ++o)
      for (int e = 0; e < a->card(o); ++e) beta[o][alpha.comp(o, e)] = f.comp(o, e);
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const auto& inj_t = tgt_cop.legs[i];
      for (int o = 0; o < nobj; ++o)
        for (int e = 0; e < spans[i].gen->target().card(o); ++e)
          beta[o][from_targets.comp(o, inj_t.comp(o, e))] = spans[i].v.comp(o, e);
    }
    PresheafMorphism beta_m(f0, f.target_ptr(), std::move(beta));
    return {alpha, beta_m};
  }

  // Marked mode: walk squares in canonical order, gluing only where the
  // square has no lift against the current working object.
  Presheaf working = *a;
  PresheafMorphism alpha = PresheafMorphism::identity(a);
  PresheafMorphism beta = f;
  for (const auto& h : gens) {
    auto tops = enumerate_maps(h.source_ptr(), a, budget);
    for (const auto& u : tops) {
      auto vs = closing_bottoms(h, f, u, budget);
      for (const auto& v : vs) {
        PresheafMorphism u_in_w = fincat::compose(alpha, u);
        LiftingProblem square{h, beta, u_in_w, v};
        if (find_lift(square, budget).has_value()) continue;
        auto [w_to_new, cell_in] = attach_cell(h, u_in_w);
        const auto new_ptr = w_to_new.target_ptr();
        const int nobj = a->base()->object_count();
        std::vector<std::vector<int>> beta_comp(nobj);
        for (int o = 0; o < nobj; ++o) beta_comp[o].assign(new_ptr->card(o), -1);
        for (int o = 0; o < nobj; ++o)
          for (int e = 0; e < working.card(o); ++e)
            beta_comp[o][w_to_new.comp(o, e)] = beta.comp(o, e);
        for (int o = 0; o < nobj; ++o)
          for (int e = 0; e < h.target().card(o); ++e)
            beta_comp[o][cell_in.comp(o, e)] = v.comp(o, e);
        beta = PresheafMorphism(new_ptr, f.target_ptr(), std::move(beta_comp));
        alpha = fincat::compose(w_to_new, alpha);
        working = *new_ptr;
      }
    }
  }
  return {alpha, beta};
}

FactorizationTrace factorize(const PresheafMorphism& f, FactorKind kind,
                             const ModelInstance& m) {
  const auto& gens = m.gens_for(kind);
  FactorizationTrace trace{f, {}, false, 0};
  trace.stages.push_back(Stage{f.source(), PresheafMorphism::identity(f.source_ptr()), f, 0});
  for (int i = 0; i <= m.iteration_cap; ++i) {
    Budget check_budget(m.budget);
    if (has_rlp(trace.stages.back().right, gens, check_budget)) {
      trace.terminated = true;
      return trace;
    }
    if (i == m.iteration_cap) break;
    Budget step_budget(m.budget);
    auto [step_left, step_right] =
        soa_step(trace.stages.back().right, gens, m.soa_mode, step_budget);
    int cells = static_cast<int>(step_right.source().total_cells() -
                                 trace.stages.back().object.total_cells());
    PresheafMorphism acc_left = fincat::compose(step_left, trace.stages.back().left);
    trace.stages.push_back(Stage{step_right.source(), std::move(acc_left), step_right, cells});
    ++trace.steps_used;
  }
  trace.terminated = false;
  return trace;
}

Replacement replacement(const Presheaf& x, ReplacementKind kind, const ModelInstance& m) {
  if (kind == ReplacementKind::Full) {
    auto full = full_replacement(x, m);
    return Replacement{full.object, full.to_object};
  }
  const auto xptr = share(x);
  if (kind == ReplacementKind::Cofibrant) {
    auto start = share(fincat::initial_presheaf(m.base));
    Budget b(m.budget);
    auto empty_maps = enumerate_maps(start, xptr, b);
    auto trace = factorize(empty_maps.front(), FactorKind::CofTrivFib, m);
    if (!trace.terminated) throw CapExhausted(std::move(trace));
    return Replacement{trace.final_stage().object, trace.right()};
  }
  auto terminal = share(fincat::terminal_presheaf(m.base));
  auto to_terminal = PresheafMorphism::constant_to_terminal(xptr, terminal);
  auto trace = factorize(to_terminal, FactorKind::TrivCofFib, m);
  if (!trace.terminated) throw CapExhausted(std::move(trace));
  return Replacement{trace.final_stage().object, trace.left()};
}

FullReplacement full_replacement(const Presheaf& x, const ModelInstance& m) {
  auto cof = replacement(x, ReplacementKind::Cofibrant, m);
  auto fib = replacement(cof.object, ReplacementKind::Fibrant, m);
  return FullReplacement{cof.object, cof.comparison, fib.object, fib.comparison};
}

CylinderData cylinder(const Presheaf& x, const ModelInstance& m) {
  return cylinder(x, m, m.soa_mode);
}

CylinderData cylinder(const Presheaf& x, const ModelInstance& m, SoaMode mode) {
  auto two = coproduct(m.base, {x, x});
  const auto fold_src = share(two.object);
  const int nobj = m.base->object_count();
  std::vector<std::vector<int>> fold_comp(nobj);
  for (int o = 0; o < nobj; ++o) fold_comp[o].assign(fold_src->card(o), -1);
  const auto xptr = share(x);
  for (int i = 0; i < 2; ++i)
    for (int o = 0; o < nobj; ++o)
      for (int e = 0; e < x.card(o); ++e) fold_comp[o][two.legs[i].comp(o, e)] = e;
  PresheafMorphism fold(fold_src, xptr, std::move(fold_comp));
  ModelInstance mm = m;
  mm.soa_mode = mode;
  auto trace = factorize(fold, FactorKind::CofTrivFib, mm);
  if (!trace.terminated) throw CapExhausted(std::move(trace));
  CylinderData c{trace.final_stage().object, fincat::compose(trace.left(), two.legs[0]),
                 fincat::compose(trace.left(), two.legs[1]), trace.right()};
  return c;
}

bool is_fibrant(const Presheaf& x, const ModelInstance& m) {
  auto terminal = share(fincat::terminal_presheaf(m.base));
  auto f = PresheafMorphism::constant_to_terminal(share(x), terminal);
  Budget b(m.budget);
  return has_rlp(f, m.triv_cof_gens, b);
}

std::optional<PresheafMorphism> left_homotopy_witness(const PresheafMorphism& f,
                                                      const PresheafMorphism& g,
                                                      const CylinderData& cyl, Budget& budget) {
  if (!(f.source() == g.source()) || !(f.target() == g.target()))
    throw ShapeError("left_homotopy_witness: maps must be parallel");
  // A witness h: C -> L with h.end0 = f and h.end1 = g is exactly a lift in
  //   ends: X+X -> C   (left)      h: C -> L (diagonal)
  //   (f,g): X+X -> L  (top)       terminal maps as right/bottom.
  const auto c = share(cyl.object);
  const auto l = f.target_ptr();
  const int nobj = c->base()->object_count();
  auto two = coproduct(c->base(), {f.source(), f.source()});
  const auto two_ptr = share(two.object);
  std::vector<std::vector<int>> ends_comp(nobj), fg_comp(nobj);
  for (int o = 0; o < nobj; ++o) {
    ends_comp[o].assign(two_ptr->card(o), -1);
    fg_comp[o].assign(two_ptr->card(o), -1);
  }
  for (int o = 0; o < nobj; ++o)
    for (int e = 0; e < f.source().card(o); ++e) {
      ends_comp[o][two.legs[0].comp(o, e)] = cyl.end0.comp(o, e);
      ends_comp[o][two.legs[1].comp(o, e)] = cyl.end1.comp(o, e);
      fg_comp[o][two.legs[0].comp(o, e)] = f.comp(o, e);
      fg_comp[o][two.legs[1].comp(o, e)] = g.comp(o, e);
    }
  PresheafMorphism ends(two_ptr, c, std::move(ends_comp));
  PresheafMorphism fg(two_ptr, l, std::move(fg_comp));
  auto terminal = share(fincat::terminal_presheaf(c->base()));
  PresheafMorphism l_to_1 = PresheafMorphism::constant_to_terminal(l, terminal);
  PresheafMorphism c_to_1 = PresheafMorphism::constant_to_terminal(c, terminal);
  LiftingProblem square{ends, l_to_1, fg, c_to_1};
  return find_lift(square, budget);
}

bool left_homotopic(const PresheafMorphism& f, const PresheafMorphism& g,
                    const ModelInstance& m) {
  auto cyl = cylinder(f.source(), m);
  Budget b(m.budget);
  return left_homotopy_witness(f, g, cyl, b).has_value();
}

PresheafMorphism replace_map(const PresheafMorphism& f, const FullReplacement& rx,
                             const FullReplacement& ry, const ModelInstance& m) {
  Budget b(m.budget);
  // Cofibrant stage: lift f.q_x through the trivial fibration q_y.
  const auto rcx = share(rx.cofibrant);
  const auto rcy = share(ry.cofibrant);
  auto start = share(fincat::initial_presheaf(m.base));
  auto empty_to_rcx = enumerate_maps(start, rcx, b).front();
  auto empty_to_rcy = enumerate_maps(start, rcy, b).front();
  LiftingProblem cof_square{empty_to_rcx, ry.from_cofibrant, empty_to_rcy,
                            fincat::compose(f, rx.from_cofibrant)};
  auto rc_f = find_lift(cof_square, b);
  if (!rc_f) throw ShapeError("replace_map: no cofibrant-stage lift (not a trivial fibration?)");
  // Fibrant stage: lift v_y . Rc f along the trivial cofibration v_x
  // against the fibration R x -> 1.
  const auto r_x = share(rx.object);
  const auto r_y = share(ry.object);
  auto terminal = share(fincat::terminal_presheaf(m.base));
  LiftingProblem fib_square{rx.to_object, PresheafMorphism::constant_to_terminal(r_y, terminal),
                            fincat::compose(ry.to_object, *rc_f),
                            PresheafMorphism::constant_to_terminal(r_x, terminal)};
  auto r_f = find_lift(fib_square, b);
  if (!r_f) throw ShapeError("replace_map: no fibrant-stage lift (target not fibrant?)");
  return *r_f;
}

std::vector<PresheafMorphism> homotopy_classes(const PresheafPtr& x, const PresheafPtr& target,
                                               const ModelInstance& m) {
  auto cyl = cylinder(*x, m);
  Budget b(m.budget);
  auto maps = enumerate_maps(x, target, b);
  std::vector<PresheafMorphism> reps;
  for (auto& f : maps) {
    bool fresh = true;
    for (const auto& r : reps) {
      Budget hb(m.budget);
      if (left_homotopy_witness(f, r, cyl, hb).has_value()) {
        fresh = false;
        break;
      }
    }
    if (fresh) reps.push_back(std::move(f));
  }
  return reps;
}

bool is_weak_equivalence(const PresheafMorphism& f, const ModelInstance& m) {
  if (m.weq_strategy == WeqStrategy::Oracle) {
    if (!m.weq_oracle) throw ShapeError("oracle strategy configured without an oracle");
    return m.weq_oracle(f);
  }
  auto rx = full_replacement(f.source(), m);
  auto ry = full_replacement(f.target(), m);
  auto rf = replace_map(f, rx, ry, m);
  const auto r_x = share(rx.object);
  const auto r_y = share(ry.object);
  auto id_x = PresheafMorphism::identity(r_x);
  auto id_y = PresheafMorphism::identity(r_y);
  auto cyl_x = cylinder(rx.object, m);
  auto cyl_y = cylinder(ry.object, m);
  auto candidates = homotopy_classes(r_y, r_x, m);
  for (const auto& g : candidates) {
    Budget b1(m.budget), b2(m.budget);
    if (left_homotopy_witness(fincat::compose(g, rf), id_x, cyl_x, b1).has_value() &&
        left_homotopy_witness(fincat::compose(rf, g), id_y, cyl_y, b2).has_value())
      return true;
  }
  return false;
}

}  // namespace finmodel::model
