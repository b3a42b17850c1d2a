#include "finmodel/workspace.hpp"

#include <cstdlib>
#include <iomanip>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace finmodel::ws {

using fincat::Presheaf;
using fincat::PresheafMorphism;
using fincat::share;
using nlohmann::json;

namespace {

std::uint64_t default_budget() {
  if (const char* env = std::getenv("FINMODEL_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
  }
  return fincat::kDefaultBudget;
}

const json& need(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where + ": missing field '" + key + "'");
  return *it;
}

int prime_or_throw(const std::string& text) {
  int p = 0;
  try {
    p = std::stoi(text);
  } catch (...) {
    throw ValidationError("instance: bad field characteristic '" + text + "'");
  }
  if (p < 2) throw ValidationError("instance: field characteristic must be a prime");
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) throw ValidationError("instance: field characteristic must be a prime");
  return p;
}

Presheaf parse_sset_object(const sset::SSetInstance& inst, const std::string& name,
                           const json& spec) {
  const std::string where = "objects/" + name;
  sset::ComplexSpec cs;
  cs.n = inst.n;
  cs.vertices = need(spec, "vertices", where).get<int>();
  if (spec.contains("edges"))
    for (const auto& e : spec["edges"]) {
      if (!e.is_array() || e.size() != 2) throw ValidationError(where + ": edge must be [s, t]");
      cs.edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
  if (spec.contains("triangles"))
    for (const auto& t : spec["triangles"]) {
      if (!t.is_array() || t.size() != 3)
        throw ValidationError(where + ": triangle must be [d0, d1, d2]");
      cs.triangles.push_back({t[0].get<int>(), t[1].get<int>(), t[2].get<int>()});
    }
  try {
    return sset::build_complex(cs);
  } catch (const std::exception& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

chain::ChainComplex parse_chain_object(int p, const std::string& name, const json& spec) {
  const std::string where = "objects/" + name;
  chain::ChainComplex c;
  c.p = p;
  c.lo = need(spec, "lo", where).get<int>();
  c.hi = need(spec, "hi", where).get<int>();
  if (c.hi >= c.lo) {
    const auto& dims = need(spec, "dims", where);
    if (static_cast<int>(dims.size()) != c.hi - c.lo + 1)
      throw ValidationError(where + ": dims length must match the support");
    for (const auto& d : dims) c.dims.push_back(d.get<int>());
  }
  if (spec.contains("d"))
    for (const auto& [deg, rows] : spec["d"].items()) {
      int n = std::stoi(deg);
      chain::Matrix m = chain::Matrix::zero(c.dim(n - 1), c.dim(n));
      if (static_cast<int>(rows.size()) != m.rows * m.cols)
        throw ValidationError(where + ": differential at degree " + deg + " has wrong size");
      for (std::size_t i = 0; i < rows.size(); ++i)
        m.data[i] = ((rows[i].get<int>() % p) + p) % p;
      c.d[n] = std::move(m);
    }
  auto errors = c.validate();
  if (!errors.empty()) throw ValidationError(where + ": " + errors.front());
  return c;
}

// Per-command model overrides (cap, budget, mode).
model::ModelInstance with_overrides(const model::ModelInstance& base, const json& c) {
  model::ModelInstance m = base;
  if (c.contains("cap")) m.iteration_cap = c["cap"].get<int>();
  if (c.contains("budget")) m.budget = c["budget"].get<std::uint64_t>();
  if (c.contains("mode")) {
    std::string mode = c["mode"].get<std::string>();
    if (mode == "naive")
      m.soa_mode = model::SoaMode::Naive;
    else if (mode == "marked")
      m.soa_mode = model::SoaMode::Marked;
    else
      throw ValidationError("mode must be naive or marked");
  }
  return m;
}

struct Runner {
  const Workspace& w;
  std::optional<hocat::HoCalc> calc;

  hocat::HoCalc& ho() {
    if (!calc) calc.emplace(w.instance.model);
    return *calc;
  }

  const Presheaf& object(const json& c, const char* key) {
    auto name = need(c, key, "command").get<std::string>();
    auto it = w.objects.find(name);
    if (it == w.objects.end()) throw NameError("unresolved object '" + name + "'");
    return it->second;
  }

  const PresheafMorphism& morphism(const json& c, const char* key) {
    auto name = need(c, key, "command").get<std::string>();
    auto it = w.morphisms.find(name);
    if (it == w.morphisms.end()) throw NameError("unresolved morphism '" + name + "'");
    return it->second;
  }

  const chain::ChainComplex& complex(const json& c, const char* key) {
    auto name = need(c, key, "command").get<std::string>();
    auto it = w.complexes.find(name);
    if (it == w.complexes.end()) throw NameError("unresolved complex '" + name + "'");
    return it->second;
  }

  const chain::ChainMap& chain_map(const json& c, const char* key) {
    auto name = need(c, key, "command").get<std::string>();
    auto it = w.chain_maps.find(name);
    if (it == w.chain_maps.end()) throw NameError("unresolved chain map '" + name + "'");
    return it->second;
  }

  std::vector<Presheaf> object_list(const json& c, const char* key) {
    std::vector<Presheaf> out;
    for (const auto& n : need(c, key, "command")) {
      auto it = w.objects.find(n.get<std::string>());
      if (it == w.objects.end())
        throw NameError("unresolved object '" + n.get<std::string>() + "'");
      out.push_back(it->second);
    }
    return out;
  }

  static std::string cells_of(const Presheaf& x) {
    std::ostringstream os;
    os << "cells=[";
    for (int o = 0; o < x.base()->object_count(); ++o) {
      if (o) os << ",";
      os << x.card(o);
    }
    os << "]";
    return os.str();
  }

  fincat::Diagram parse_diagram(const json& c) {
    auto shape = need(c, "shape", "command").get<std::string>();
    fincat::Diagram d;
    if (shape == "span") {
      const auto& f = morphism(c, "left");
      const auto& g = morphism(c, "right");
      if (!(f.source() == g.source())) throw ValidationError("span legs must share a source");
      d.shape = std::make_shared<const fincat::FinCategory>(
          std::vector<std::string>{"a", "b", "c"},
          std::vector<fincat::MorData>{
              {"ida", 0, 0}, {"idb", 1, 1}, {"idc", 2, 2}, {"f", 0, 1}, {"g", 0, 2}},
          std::vector<int>{0, 1, 2},
          std::vector<std::vector<int>>{{0, -1, -1, -1, -1},
                                        {-1, 1, -1, 3, -1},
                                        {-1, -1, 2, -1, 4},
                                        {3, -1, -1, -1, -1},
                                        {4, -1, -1, -1, -1}});
      d.objects = {f.source(), f.target(), g.target()};
      d.arrows = {PresheafMorphism::identity(f.source_ptr()),
                  PresheafMorphism::identity(f.target_ptr()),
                  PresheafMorphism::identity(g.target_ptr()), f, g};
      return d;
    }
    if (shape == "parallel") {
      const auto& f = morphism(c, "first");
      const auto& g = morphism(c, "second");
      if (!(f.source() == g.source()) || !(f.target() == g.target()))
        throw ValidationError("parallel pair must share both endpoints");
      d.shape = std::make_shared<const fincat::FinCategory>(
          std::vector<std::string>{"a", "b"},
          std::vector<fincat::MorData>{{"ida", 0, 0}, {"idb", 1, 1}, {"f", 0, 1}, {"g", 0, 1}},
          std::vector<int>{0, 1},
          std::vector<std::vector<int>>{
              {0, -1, -1, -1}, {-1, 1, 2, 3}, {2, -1, -1, -1}, {3, -1, -1, -1}});
      d.objects = {f.source(), f.target()};
      d.arrows = {PresheafMorphism::identity(f.source_ptr()),
                  PresheafMorphism::identity(f.target_ptr()), f, g};
      return d;
    }
    if (shape == "discrete") {
      auto objs = object_list(c, "objects");
      std::vector<std::string> names;
      std::vector<fincat::MorData> mors;
      std::vector<int> identities;
      const int n = static_cast<int>(objs.size());
      std::vector<std::vector<int>> table(n, std::vector<int>(n, -1));
      for (int i = 0; i < n; ++i) {
        names.push_back("o" + std::to_string(i));
        mors.push_back({"id" + std::to_string(i), i, i});
        identities.push_back(i);
        table[i][i] = i;
      }
      d.shape = std::make_shared<const fincat::FinCategory>(names, mors, identities, table);
      d.objects = objs;
      for (int i = 0; i < n; ++i) d.arrows.push_back(PresheafMorphism::identity(share(objs[i])));
      return d;
    }
    throw ValidationError("unknown diagram shape '" + shape + "'");
  }

  std::string execute(const std::string& cmd, const json& c);
};

std::string Runner::execute(const std::string& cmd, const json& c) {
  std::ostringstream os;

  // --- common / simplicial commands -----------------------------------------
  if (cmd == "validate") {
    std::vector<std::string> errors;
    if (c.contains("object")) {
      if (w.is_sset())
        errors = object(c, "object").validate();
      else
        errors = complex(c, "object").validate();
    } else if (c.contains("morphism")) {
      if (w.is_sset())
        errors = morphism(c, "morphism").check_naturality();
      else
        errors = chain_map(c, "morphism").validate();
    } else {
      throw ValidationError("validate needs an object or a morphism");
    }
    if (errors.empty()) return "valid";
    return "invalid (" + std::to_string(errors.size()) + "): " + errors.front();
  }

  if (w.is_sset()) {
    auto instance = with_overrides(w.instance.model, c);
    if (cmd == "factorize") {
      const auto& f = morphism(c, "morphism");
      auto kind = model::FactorKind::CofTrivFib;
      if (c.value("kind", "cof_trivfib") == std::string("trivcof_fib"))
        kind = model::FactorKind::TrivCofFib;
      auto trace = model::factorize(f, kind, instance);
      os << "terminated=" << (trace.terminated ? "true" : "false")
         << " steps=" << trace.steps_used << " stages=[";
      for (std::size_t i = 0; i < trace.stages.size(); ++i) {
        if (i) os << ",";
        os << trace.stages[i].object.total_cells();
      }
      os << "]";
      return os.str();
    }
    if (cmd == "replace") {
      const auto& x = object(c, "object");
      auto which = c.value("which", "full");
      model::ReplacementKind kind = model::ReplacementKind::Full;
      if (which == "cofibrant") kind = model::ReplacementKind::Cofibrant;
      else if (which == "fibrant") kind = model::ReplacementKind::Fibrant;
      else if (which != "full") throw ValidationError("which must be cofibrant|fibrant|full");
      auto rep = model::replacement(x, kind, instance);
      os << cells_of(rep.object) << " pi0=" << sset::pi0(rep.object);
      return os.str();
    }
    if (cmd == "cylinder") {
      auto cyl = model::cylinder(object(c, "object"), instance);
      os << cells_of(cyl.object);
      return os.str();
    }
    if (cmd == "is-weq") {
      return model::is_weak_equivalence(morphism(c, "morphism"), instance) ? "true" : "false";
    }
    if (cmd == "ho-hom") {
      const auto& hom = ho().ho_hom(object(c, "source"), object(c, "target"));
      return "classes=" + std::to_string(hom.classes.size());
    }
    if (cmd == "ho-product" || cmd == "ho-coproduct") {
      auto objs = object_list(c, "objects");
      auto fam = cmd == "ho-product" ? ho().ho_product(objs) : ho().ho_coproduct(objs);
      os << cells_of(fam.object) << " pi0=" << sset::pi0(fam.object)
         << " structure=" << fam.structure.size();
      return os.str();
    }
    if (cmd == "homotopy-pushout") {
      auto square = ho().homotopy_pushout(morphism(c, "left"), morphism(c, "right"));
      os << cells_of(square.object) << " pi0=" << sset::pi0(square.object);
      return os.str();
    }
    if (cmd == "weak-coequalizer") {
      auto wc = ho().weak_coequalizer(morphism(c, "first"), morphism(c, "second"));
      os << cells_of(wc.square.object) << " pi0=" << sset::pi0(wc.square.object);
      return os.str();
    }
    if (cmd == "weak-colimit") {
      auto weak = ho().standard_weak_colimit(parse_diagram(c));
      os << cells_of(weak.object) << " pi0=" << sset::pi0(weak.object)
         << " cocone=" << weak.cocone.size();
      return os.str();
    }
    if (cmd == "comparison") {
      auto d = parse_diagram(c);
      auto weak = ho().standard_weak_colimit(d);
      auto strict = fincat::finite_colimit(d);
      auto cmp = ho().comparison_morphism(weak, strict, d);
      os << "exact=" << (cmp.exact_equations ? "yes" : "no");
      if (w.sset_level <= 2)
        os << " weq=" << (sset::weq_oracle(w.instance, cmp.map) ? "true" : "false");
      return os.str();
    }
    if (cmd == "e-image") {
      auto img = ho().canonical_image(object(c, "object"), object_list(c, "A"));
      os << "sizes=[";
      for (std::size_t i = 0; i < img.hom_to_target.size(); ++i) {
        if (i) os << ",";
        os << img.hom_to_target[i].classes.size();
      }
      os << "]";
      return os.str();
    }
    if (cmd == "check-full-faithful") {
      auto report = ho().check_index_full_faithful(object_list(c, "A"), object_list(c, "sample"));
      os << "full=" << (report.full ? "yes" : "no")
         << " faithful=" << (report.faithful ? "yes" : "no")
         << " transformations=" << report.transformations_checked;
      return os.str();
    }
    if (cmd == "phantom") {
      const auto& f = morphism(c, "f");
      const auto& g = morphism(c, "g");
      if (!(f.source() == g.source()) || !(f.target() == g.target()))
        throw ValidationError("phantom pair must be parallel");
      auto rf = ho().project_map(f);
      auto rg = ho().project_map(g);
      bool eq = ho().phantom_equivalent(f.source(), f.target(), rf, rg, object_list(c, "A"));
      return eq ? "true" : "false";
    }
    if (cmd == "phantom-pair") {
      auto pair = ho().weakly_initial_phantom_pair(object(c, "object"), object_list(c, "A"));
      os << "phantom=" << (pair.phantom_equivalent ? "true" : "false");
      if (c.contains("targets")) {
        auto report = ho().certify_phantom_initiality(object(c, "object"), pair,
                                                      object_list(c, "A"),
                                                      object_list(c, "targets"));
        os << " initial=" << (report.initial ? "true" : "false")
           << " pairs=" << report.pairs_checked;
      }
      return os.str();
    }
    if (cmd == "support") {
      const auto& f = morphism(c, "morphism");
      auto parts = object_list(c, "parts");
      auto cop = fincat::coproduct(w.instance.cat, parts);
      if (!(cop.object == f.target()))
        throw ValidationError("support: target is not the coproduct of the given parts");
      auto support = fincat::subcoproduct_support(f, cop.legs);
      os << "J=[";
      for (std::size_t i = 0; i < support.size(); ++i) {
        if (i) os << ",";
        os << support[i];
      }
      os << "]";
      return os.str();
    }
    if (cmd == "classify") {
      const auto& names_json = need(c, "objects", "command");
      std::map<std::string, std::vector<std::string>> by_forest;
      for (const auto& n : names_json) {
        auto name = n.get<std::string>();
        auto it = w.objects.find(name);
        if (it == w.objects.end()) throw NameError("unresolved object '" + name + "'");
        by_forest[sset::forest_invariant(w.instance, it->second).serialize()].push_back(name);
      }
      bool first = true;
      for (auto& [forest, names] : by_forest) {
        if (!first) os << " | ";
        first = false;
        std::sort(names.begin(), names.end());
        os << "[" << forest << "]";
        for (const auto& n : names) os << " " << n;
      }
      return os.str();
    }
    throw ValidationError("unknown command '" + cmd + "' for a simplicial instance");
  }

  // --- chain commands --------------------------------------------------------
  if (cmd == "homology") {
    int degree = need(c, "degree", "command").get<int>();
    return std::to_string(chain::homology(complex(c, "object"), degree));
  }
  if (cmd == "quasi-iso") {
    return chain::is_quasi_iso(chain_map(c, "morphism")) ? "true" : "false";
  }
  if (cmd == "is-fibration") {
    return chain::is_fibration(chain_map(c, "morphism")) ? "true" : "false";
  }
  if (cmd == "truncate") {
    auto t = chain::truncate(complex(c, "object"), need(c, "k", "command").get<int>());
    os << "support=[" << t.lo << "," << t.hi << "] dims=[";
    for (std::size_t i = 0; i < t.dims.size(); ++i) {
      if (i) os << ",";
      os << t.dims[i];
    }
    os << "]";
    return os.str();
  }
  if (cmd == "verify-truncation-colimit") {
    auto report =
        chain::verify_truncation_colimit(complex(c, "object"), need(c, "K", "command").get<int>());
    switch (report.status) {
      case chain::ColimitReport::Status::Pass:
        return "pass";
      case chain::ColimitReport::Status::TooSmall:
        return "too-small: " + report.notes.front();
      case chain::ColimitReport::Status::Fail:
        return "fail: " + report.notes.front();
    }
  }
  throw ValidationError("unknown command '" + cmd + "' for a chain instance");
}

}  // namespace

Workspace parse(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("syntax: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("document must be a JSON object");

  Workspace w;
  auto inst = need(doc, "instance", "document").get<std::string>();
  if (inst.rfind("sset:", 0) == 0) {
    int level = 0;
    try {
      level = std::stoi(inst.substr(5));
    } catch (...) {
    }
    if (level < 1 || level > 3) throw ValidationError("instance: sset level must be 1, 2 or 3");
    w.sset_level = level;
  } else if (inst.rfind("chain:", 0) == 0) {
    w.chain_p = prime_or_throw(inst.substr(6));
  } else {
    throw ValidationError("instance: expected sset:n or chain:p, got '" + inst + "'");
  }

  sset::ModelOptions opts;
  opts.budget = default_budget();
  if (doc.contains("options")) {
    const auto& o = doc["options"];
    if (o.contains("cap")) opts.iteration_cap = o["cap"].get<int>();
    if (o.contains("budget")) opts.budget = o["budget"].get<std::uint64_t>();
  }
  if (w.is_sset()) {
    w.instance = sset::make_instance(w.sset_level, opts);
    if (doc.contains("options") && doc["options"].contains("mode")) {
      auto mode = doc["options"]["mode"].get<std::string>();
      if (mode == "naive")
        w.instance.model.soa_mode = model::SoaMode::Naive;
      else if (mode != "marked")
        throw ValidationError("options/mode must be naive or marked");
    }
  }

  if (doc.contains("objects"))
    for (const auto& [name, spec] : doc["objects"].items()) {
      if (w.is_sset())
        w.objects.emplace(name, parse_sset_object(w.instance, name, spec));
      else
        w.complexes.emplace(name, parse_chain_object(w.chain_p, name, spec));
    }

  if (doc.contains("morphisms"))
    for (const auto& [name, spec] : doc["morphisms"].items()) {
      const std::string where = "morphisms/" + name;
      auto src_name = need(spec, "source", where).get<std::string>();
      auto tgt_name = need(spec, "target", where).get<std::string>();
      if (w.is_sset()) {
        auto src = w.objects.find(src_name);
        auto tgt = w.objects.find(tgt_name);
        if (src == w.objects.end()) throw NameError(where + ": unresolved object '" + src_name + "'");
        if (tgt == w.objects.end()) throw NameError(where + ": unresolved object '" + tgt_name + "'");
        std::vector<std::vector<int>> comps;
        for (const auto& level : need(spec, "components", where))
          comps.push_back(level.get<std::vector<int>>());
        try {
          PresheafMorphism m(share(src->second), share(tgt->second), std::move(comps));
          auto squares = m.check_naturality();
          if (!squares.empty()) throw ValidationError(where + ": " + squares.front());
          w.morphisms.emplace(name, std::move(m));
        } catch (const fincat::ShapeError& e) {
          throw ValidationError(where + ": " + e.what());
        }
      } else {
        auto src = w.complexes.find(src_name);
        auto tgt = w.complexes.find(tgt_name);
        if (src == w.complexes.end())
          throw NameError(where + ": unresolved complex '" + src_name + "'");
        if (tgt == w.complexes.end())
          throw NameError(where + ": unresolved complex '" + tgt_name + "'");
        chain::ChainMap m{src->second, tgt->second, {}};
        if (spec.contains("components"))
          for (const auto& [deg, rows] : spec["components"].items()) {
            int n = std::stoi(deg);
            chain::Matrix mat = chain::Matrix::zero(m.target.dim(n), m.source.dim(n));
            if (static_cast<int>(rows.size()) != mat.rows * mat.cols)
              throw ValidationError(where + ": component at degree " + deg + " has wrong size");
            for (std::size_t i = 0; i < rows.size(); ++i)
              mat.data[i] = ((rows[i].get<int>() % w.chain_p) + w.chain_p) % w.chain_p;
            m.comp[n] = std::move(mat);
          }
        auto errors = m.validate();
        if (!errors.empty()) throw ValidationError(where + ": " + errors.front());
        w.chain_maps.emplace(name, std::move(m));
      }
    }

  // resolve command name references now so bad documents fail before running
  if (doc.contains("commands")) {
    if (!doc["commands"].is_array()) throw ValidationError("commands must be an array");
    static const std::vector<std::string> object_keys{"object", "source", "target"};
    static const std::vector<std::string> morphism_keys{"morphism", "left",   "right",
                                                        "first",    "second", "f",
                                                        "g"};
    static const std::vector<std::string> list_keys{"objects", "A", "sample", "targets", "parts"};
    for (const auto& c : doc["commands"]) {
      if (!c.contains("cmd")) throw ValidationError("command without a cmd field");
      for (const auto& key : object_keys)
        if (c.contains(key) && c[key].is_string()) {
          auto name = c[key].get<std::string>();
          if (w.is_sset() ? !w.objects.count(name) : !w.complexes.count(name))
            throw NameError("commands: unresolved object '" + name + "'");
        }
      for (const auto& key : morphism_keys)
        if (c.contains(key) && c[key].is_string()) {
          auto name = c[key].get<std::string>();
          if (w.is_sset() ? !w.morphisms.count(name) : !w.chain_maps.count(name))
            throw NameError("commands: unresolved morphism '" + name + "'");
        }
      for (const auto& key : list_keys)
        if (c.contains(key))
          for (const auto& n : c[key]) {
            auto name = n.get<std::string>();
            if (w.is_sset() ? !w.objects.count(name) : !w.complexes.count(name))
              throw NameError("commands: unresolved object '" + name + "'");
          }
    }
  }

  w.normalized = doc.dump(2) + "\n";
  return w;
}

std::string serialize(const Workspace& w) { return w.normalized; }

RunResult run(const Workspace& w) {
  json doc = json::parse(w.normalized);
  std::ostringstream out;
  RunResult result;
  Runner runner{w, std::nullopt};
  int idx = 0;
  for (const auto& c : doc.value("commands", json::array())) {
    ++idx;
    auto cmd = c.value("cmd", "");
    out << std::setw(2) << std::setfill('0') << idx << " " << cmd << ": ";
    try {
      out << runner.execute(cmd, c);
    } catch (const std::exception& e) {
      out << "error: " << e.what();
      result.exit_code = 1;
    }
    out << "\n";
  }
  result.report = out.str();
  return result;
}

}  // namespace finmodel::ws
