#include "finmodel/sset.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <tuple>

namespace finmodel::sset {

using fincat::ShapeError;

namespace {

// Order-preserving maps ordinal a -> ordinal b as nondecreasing tuples,
// lexicographic order.
std::vector<std::vector<int>> ord_maps(int a, int b) {
  std::vector<std::vector<int>> out;
  if (a == 0) {
    out.push_back({});
    return out;
  }
  if (b <= 0) return out;
  std::vector<int> cur(a, 0);
  while (true) {
    out.push_back(cur);
    int i = a - 1;
    while (i >= 0 && cur[i] == b - 1) --i;
    if (i < 0) break;
    int v = cur[i] + 1;
    for (int j = i; j < a; ++j) cur[j] = v;
  }
  return out;
}

bool surjective_onto(const std::vector<int>& tuple, int b) {
  std::vector<char> hit(b, 0);
  for (int v : tuple) hit[v] = 1;
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

struct SimplexData {
  CatPtr cat;
  // tuples[m] = image tuple of morphism m; sources/targets are ordinals.
  std::vector<std::vector<int>> tuples;
  std::map<std::tuple<int, int, std::vector<int>>, int> index;

  int find(int a, int b, const std::vector<int>& t) const {
    auto it = index.find({a, b, t});
    if (it == index.end()) throw ShapeError("simplex category: no such morphism");
    return it->second;
  }
};

const SimplexData& simplex_data(int n) {
  static std::map<int, SimplexData> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  if (n < 1) throw std::out_of_range("simplex_category: n must be >= 1");

  SimplexData data;
  std::vector<std::string> objects;
  for (int k = 1; k <= n; ++k) objects.push_back(std::to_string(k));
  std::vector<fincat::MorData> mors;
  std::vector<int> identities(n, -1);
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      for (auto& t : ord_maps(a, b)) {
        std::string name = std::to_string(a) + ">" + std::to_string(b) + "(";
        for (int v : t) name += std::to_string(v);
        name += ")";
        int id = static_cast<int>(mors.size());
        mors.push_back({name, a - 1, b - 1});
        data.tuples.push_back(t);
        data.index[{a, b, t}] = id;
        bool is_id = a == b;
        for (int i = 0; i < a && is_id; ++i) is_id = t[i] == i;
        if (is_id) identities[a - 1] = id;
      }
  const int nm = static_cast<int>(mors.size());
  std::vector<std::vector<int>> table(nm, std::vector<int>(nm, -1));
  for (int g = 0; g < nm; ++g)
    for (int f = 0; f < nm; ++f) {
      if (mors[f].target != mors[g].source) continue;
      const auto& tf = data.tuples[f];
      const auto& tg = data.tuples[g];
      std::vector<int> comp(tf.size());
      for (std::size_t i = 0; i < tf.size(); ++i) comp[i] = tg[tf[i]];
      table[g][f] = data.index.at({mors[f].source + 1, mors[g].target + 1, comp});
    }
  data.cat = std::make_shared<const fincat::FinCategory>(objects, mors, identities, table);
  return cache.emplace(n, std::move(data)).first->second;
}

enum class StdKind { Delta, Boundary, Horn };

bool cell_in(StdKind kind, const std::vector<int>& tuple, int m, int horn_k) {
  switch (kind) {
    case StdKind::Delta:
      return true;
    case StdKind::Boundary:
      return !surjective_onto(tuple, m + 1);
    case StdKind::Horn: {
      // in the horn iff the image misses some vertex other than horn_k
      std::vector<char> hit(m + 1, 0);
      for (int v : tuple) hit[v] = 1;
      for (int i = 0; i <= m; ++i)
        if (i != horn_k && !hit[i]) return true;
      return false;
    }
  }
  return false;
}

Presheaf standard_object(int n, int m, StdKind kind, int horn_k) {
  if (n < 1 || m < 0 || m > n) throw std::out_of_range("standard object: bad indices");
  const auto& data = simplex_data(n);
  const auto& cat = *data.cat;
  // cells at ordinal k: order-preserving maps k -> m+1 passing the filter
  std::vector<std::vector<std::vector<int>>> cells(n);
  std::vector<std::map<std::vector<int>, int>> index(n);
  std::vector<int> cards(n, 0);
  for (int k = 1; k <= n; ++k)
    for (auto& t : ord_maps(k, m + 1))
      if (cell_in(kind, t, m, horn_k)) {
        index[k - 1][t] = cards[k - 1]++;
        cells[k - 1].push_back(t);
      }
  std::vector<std::vector<int>> actions(cat.morphism_count());
  for (int mor = 0; mor < cat.morphism_count(); ++mor) {
    const int a = cat.source(mor) + 1, b = cat.target(mor) + 1;
    const auto& phi = data.tuples[mor];
    actions[mor].resize(cards[b - 1]);
    for (int e = 0; e < cards[b - 1]; ++e) {
      const auto& sigma = cells[b - 1][e];
      std::vector<int> comp(a);
      for (int i = 0; i < a; ++i) comp[i] = sigma[phi[i]];
      actions[mor][e] = index[a - 1].at(comp);
    }
  }
  return Presheaf(data.cat, cards, std::move(actions));
}

PresheafMorphism standard_inclusion(int n, int m, StdKind kind, int horn_k) {
  Presheaf sub = standard_object(n, m, kind, horn_k);
  Presheaf full = standard_object(n, m, StdKind::Delta, 0);
  // components by tuple lookup
  std::vector<std::map<std::vector<int>, int>> full_index(n);
  {
    for (int k = 1; k <= n; ++k) {
      int i = 0;
      for (auto& t : ord_maps(k, m + 1)) full_index[k - 1][t] = i++;
    }
  }
  std::vector<std::vector<int>> comps(n);
  for (int k = 1; k <= n; ++k)
    for (auto& t : ord_maps(k, m + 1))
      if (cell_in(kind, t, m, horn_k)) comps[k - 1].push_back(full_index[k - 1].at(t));
  return PresheafMorphism(fincat::share(std::move(sub)), fincat::share(std::move(full)),
                          std::move(comps));
}

}  // namespace

CatPtr simplex_category(int n) { return simplex_data(n).cat; }

Presheaf delta(int n, int m) { return standard_object(n, m, StdKind::Delta, 0); }
Presheaf boundary(int n, int m) { return standard_object(n, m, StdKind::Boundary, 0); }

Presheaf horn(int n, int m, int k) {
  if (k < 0 || k > m || m < 1) throw std::out_of_range("horn: need 0 <= k <= m, m >= 1");
  return standard_object(n, m, StdKind::Horn, k);
}

PresheafMorphism boundary_inclusion(int n, int m) {
  return standard_inclusion(n, m, StdKind::Boundary, 0);
}

PresheafMorphism horn_inclusion(int n, int m, int k) {
  if (k < 0 || k > m || m < 1) throw std::out_of_range("horn: need 0 <= k <= m, m >= 1");
  return standard_inclusion(n, m, StdKind::Horn, k);
}

Generators generators(int n) {
  Generators g;
  for (int m = 0; m < n; ++m) g.cof.push_back(boundary_inclusion(n, m));
  if (n == 1) {
    g.triv_cof.push_back(horn_inclusion(1, 1, 0));
  } else if (n == 2) {
    g.triv_cof.push_back(horn_inclusion(2, 1, 0));
    g.triv_cof.push_back(horn_inclusion(2, 1, 1));
    g.triv_cof.push_back(horn_inclusion(2, 2, 0));
    g.triv_cof.push_back(horn_inclusion(2, 2, 2));
  } else {
    for (int m = 1; m <= n; ++m)
      for (int k = 0; k <= m; ++k) g.triv_cof.push_back(horn_inclusion(n, m, k));
  }
  return g;
}

// --- complexes from nondegenerate data ---------------------------------------

namespace {

struct Cell {
  int dim;                // ordinal of the nondegenerate base (1, 2 or 3)
  int base;               // index into the base list of that dimension
  std::vector<int> surj;  // level ordinal ->> dim, order-preserving surjection

  bool operator<(const Cell& o) const {
    return std::tie(dim, base, surj) < std::tie(o.dim, o.base, o.surj);
  }
};

std::vector<int> identity_tuple(int k) {
  std::vector<int> t(k);
  std::iota(t.begin(), t.end(), 0);
  return t;
}

struct ComplexBuilder {
  const ComplexSpec& spec;
  std::vector<Cell> tri_d0, tri_d1, tri_d2;   // level-2 face cells per triangle
  std::vector<std::array<int, 3>> tri_verts;  // vertex indices per triangle

  explicit ComplexBuilder(const ComplexSpec& s) : spec(s) { resolve_faces(); }

  Cell level2_cell(int idx) const {
    if (idx < 0 || idx >= spec.vertices + static_cast<int>(spec.edges.size()))
      throw ShapeError("triangle face index out of range");
    if (idx < spec.vertices) return Cell{1, idx, {0, 0}};
    return Cell{2, idx - spec.vertices, {0, 1}};
  }

  int cell_src(const Cell& c) const {
    return c.dim == 1 ? c.base : spec.edges[c.base][0];
  }
  int cell_tgt(const Cell& c) const {
    return c.dim == 1 ? c.base : spec.edges[c.base][1];
  }

  void resolve_faces() {
    for (const auto& t : spec.triangles) {
      Cell d0 = level2_cell(t[0]), d1 = level2_cell(t[1]), d2 = level2_cell(t[2]);
      int v0 = cell_src(d2), v1 = cell_tgt(d2), v2 = cell_tgt(d0);
      if (cell_src(d1) != v0 || cell_src(d0) != v1 || cell_tgt(d1) != v2)
        throw ShapeError("triangle faces have incompatible vertices");
      tri_d0.push_back(d0);
      tri_d1.push_back(d1);
      tri_d2.push_back(d2);
      tri_verts.push_back({v0, v1, v2});
    }
  }

  // Face of a nondegenerate base cell along an order-preserving injection,
  // given as the sorted image.
  Cell face_of_base(int dim, int base, const std::vector<int>& image) const {
    const int i = static_cast<int>(image.size());
    if (i == dim) return Cell{dim, base, identity_tuple(dim)};
    if (dim == 2) {
      int v = image[0] == 0 ? spec.edges[base][0] : spec.edges[base][1];
      return Cell{1, v, {0}};
    }
    if (dim == 3 && i == 2) {
      if (image[0] == 1) return tri_d0[base];       // {1,2}
      if (image[1] == 2) return tri_d1[base];       // {0,2}
      return tri_d2[base];                          // {0,1}
    }
    if (dim == 3 && i == 1) return Cell{1, tri_verts[base][image[0]], {0}};
    throw ShapeError("face_of_base: bad injection");
  }

  // Image of a cell under precomposition with phi (a -> level of the cell).
  Cell act_on_cell(const Cell& c, const std::vector<int>& phi) const {
    std::vector<int> t(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) t[i] = c.surj[phi[i]];
    std::vector<int> image(t);
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    std::vector<int> pi(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      pi[i] = static_cast<int>(std::lower_bound(image.begin(), image.end(), t[i]) -
                               image.begin());
    Cell f = face_of_base(c.dim, c.base, image);
    std::vector<int> surj(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) surj[i] = f.surj[pi[i]];
    return Cell{f.dim, f.base, std::move(surj)};
  }

  Presheaf build() const {
    const int n = spec.n;
    const auto& data = simplex_data(n);
    const auto& cat = *data.cat;
    const int base_counts[4] = {0, spec.vertices, static_cast<int>(spec.edges.size()),
                                static_cast<int>(spec.triangles.size())};
    std::vector<std::vector<Cell>> cells(n);
    std::vector<std::map<Cell, int>> index(n);
    for (int k = 1; k <= n; ++k) {
      for (int d = 1; d <= std::min(k, 3); ++d)
        for (int b = 0; b < base_counts[d]; ++b)
          for (auto& s : ord_maps(k, d))
            if (surjective_onto(s, d)) cells[k - 1].push_back(Cell{d, b, s});
      std::sort(cells[k - 1].begin(), cells[k - 1].end());
      for (std::size_t i = 0; i < cells[k - 1].size(); ++i)
        index[k - 1][cells[k - 1][i]] = static_cast<int>(i);
    }
    std::vector<int> cards(n);
    for (int k = 1; k <= n; ++k) cards[k - 1] = static_cast<int>(cells[k - 1].size());
    std::vector<std::vector<int>> actions(cat.morphism_count());
    for (int mor = 0; mor < cat.morphism_count(); ++mor) {
      const int a = cat.source(mor) + 1, b = cat.target(mor) + 1;
      const auto& phi = data.tuples[mor];
      actions[mor].resize(cards[b - 1]);
      for (int e = 0; e < cards[b - 1]; ++e)
        actions[mor][e] = index[a - 1].at(act_on_cell(cells[b - 1][e], phi));
    }
    return Presheaf(data.cat, cards, std::move(actions));
  }
};

}  // namespace

Presheaf build_complex(const ComplexSpec& spec) {
  if (spec.n < 1 || spec.n > 3) throw std::out_of_range("build_complex: 1 <= n <= 3");
  if (spec.n < 2 && !spec.edges.empty()) throw ShapeError("edges need level >= 2");
  if (spec.n < 3 && !spec.triangles.empty()) throw ShapeError("triangles need level 3");
  for (const auto& e : spec.edges)
    if (e[0] < 0 || e[0] >= spec.vertices || e[1] < 0 || e[1] >= spec.vertices)
      throw ShapeError("edge endpoint out of range");
  if (spec.n == 1) return finite_set(spec.vertices);
  return ComplexBuilder(spec).build();
}

int edge_source(const Presheaf& x, int edge) {
  const auto& data = simplex_data(x.base()->object_count());
  return x.act(data.find(1, 2, {0}), edge);
}

int edge_target(const Presheaf& x, int edge) {
  const auto& data = simplex_data(x.base()->object_count());
  return x.act(data.find(1, 2, {1}), edge);
}

bool edge_is_degenerate(const Presheaf& x, int edge) {
  const auto& data = simplex_data(x.base()->object_count());
  int v = x.act(data.find(1, 2, {0}), edge);
  return x.act(data.find(2, 1, {0, 0}), v) == edge;
}

Presheaf finite_set(int n_elements) {
  auto cat = simplex_category(1);
  std::vector<int> card{n_elements};
  std::vector<int> idact(n_elements);
  std::iota(idact.begin(), idact.end(), 0);
  return Presheaf(cat, card, {idact});
}

Presheaf graph(int vertices, std::vector<std::array<int, 2>> edges) {
  return build_complex(ComplexSpec{2, vertices, std::move(edges), {}});
}

Presheaf point(int n) { return build_complex(ComplexSpec{n, 1, {}, {}}); }

Presheaf point_with_loops(int n, int loops) {
  std::vector<std::array<int, 2>> edges(loops, {0, 0});
  return build_complex(ComplexSpec{n, 1, std::move(edges), {}});
}

Presheaf nerve_z2() {
  // one vertex, the involution edge s, and the 2-cell witnessing s.s = 1
  return build_complex(ComplexSpec{3, 1, {{0, 0}}, {{1, 0, 1}}});
}

// --- instance ----------------------------------------------------------------

SSetInstance make_instance(int n, const ModelOptions& opts) {
  SSetInstance inst;
  inst.n = n;
  inst.cat = simplex_category(n);
  auto gens = generators(n);
  inst.model.base = inst.cat;
  inst.model.cof_gens = std::move(gens.cof);
  inst.model.triv_cof_gens = std::move(gens.triv_cof);
  inst.model.iteration_cap = opts.iteration_cap;
  inst.model.budget = opts.budget;
  if (n <= 2) {
    inst.model.weq_strategy = model::WeqStrategy::Oracle;
    const int level = n;
    inst.model.weq_oracle = [level](const PresheafMorphism& f) {
      SSetInstance probe;
      probe.n = level;
      return weq_oracle(probe, f);
    };
  } else {
    inst.model.weq_strategy = model::WeqStrategy::Search;
  }
  return inst;
}

bool weq_oracle(const SSetInstance& inst, const PresheafMorphism& f) {
  if (inst.n == 1) {
    bool src_empty = f.source().total_cells() == 0;
    bool tgt_empty = f.target().total_cells() == 0;
    return src_empty == tgt_empty;
  }
  if (inst.n == 2) {
    auto src_labels = pi0_labels(f.source());
    auto tgt_labels = pi0_labels(f.target());
    int src_count = pi0(f.source());
    int tgt_count = pi0(f.target());
    if (src_count != tgt_count) return false;
    // induced map on components must be a bijection
    std::vector<int> image(src_count, -1);
    std::vector<char> hit(tgt_count, 0);
    for (int v = 0; v < f.source().card(0); ++v) {
      int c = src_labels[v];
      int d = tgt_labels[f.comp(0, v)];
      if (image[c] < 0) image[c] = d;
      // distinct source vertices in one component always land in one target
      // component (they are connected through edges)
    }
    for (int c = 0; c < src_count; ++c) {
      if (image[c] < 0) return false;
      if (hit[image[c]]) return false;
      hit[image[c]] = 1;
    }
    return true;
  }
  return model::is_weak_equivalence(f, inst.model);
}

int pi0(const Presheaf& x) {
  auto labels = pi0_labels(x);
  return labels.empty() ? 0 : 1 + *std::max_element(labels.begin(), labels.end());
}

std::vector<int> pi0_labels(const Presheaf& x) {
  const int v = x.card(0);
  std::vector<int> parent(v);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  if (x.base()->object_count() >= 2) {
    const auto& data = simplex_data(x.base()->object_count());
    int src_m = data.find(1, 2, {0});
    int tgt_m = data.find(1, 2, {1});
    for (int e = 0; e < x.card(1); ++e) {
      int a = find(x.act(src_m, e)), b = find(x.act(tgt_m, e));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::vector<int> label(v, -1);
  int next = 0;
  for (int i = 0; i < v; ++i) {
    int r = find(i);
    if (label[r] < 0) label[r] = next++;
    label[i] = label[r];
  }
  return label;
}

// --- corpora -----------------------------------------------------------------

std::vector<Presheaf> set_corpus(int max_size) {
  std::vector<Presheaf> out;
  for (int k = 0; k <= max_size; ++k) out.push_back(finite_set(k));
  return out;
}

namespace {

using EdgeList = std::vector<std::array<int, 2>>;

EdgeList relabel_sorted(const EdgeList& edges, const std::vector<int>& perm) {
  EdgeList out;
  out.reserve(edges.size());
  for (const auto& e : edges) out.push_back({perm[e[0]], perm[e[1]]});
  std::sort(out.begin(), out.end());
  return out;
}

bool is_canonical(int vertices, const EdgeList& sorted_edges) {
  std::vector<int> perm(vertices);
  std::iota(perm.begin(), perm.end(), 0);
  while (std::next_permutation(perm.begin(), perm.end()))
    if (relabel_sorted(sorted_edges, perm) < sorted_edges) return false;
  return true;
}

}  // namespace

std::vector<Presheaf> multigraph_corpus(int max_vertices, int max_edges) {
  std::vector<Presheaf> out;
  for (int v = 0; v <= max_vertices; ++v) {
    std::vector<std::array<int, 2>> types;
    for (int i = 0; i < v; ++i)
      for (int j = 0; j < v; ++j) types.push_back({i, j});
    // multisets of edge types, nondecreasing type indices
    std::vector<std::vector<int>> picks;
    std::vector<int> cur;
    std::function<void(int, int)> gen = [&](int start, int remaining) {
      picks.push_back(cur);
      if (remaining == 0) return;
      for (int t = start; t < static_cast<int>(types.size()); ++t) {
        cur.push_back(t);
        gen(t, remaining - 1);
        cur.pop_back();
      }
    };
    gen(0, max_edges);
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    for (const auto& pick : picks) {
      EdgeList edges;
      for (int t : pick) edges.push_back(types[t]);
      std::sort(edges.begin(), edges.end());
      if (!is_canonical(v, edges)) continue;
      out.push_back(graph(v, edges));
    }
  }
  return out;
}

bool isomorphic(const Presheaf& x, const Presheaf& y, Budget& budget) {
  if (x.cards() != y.cards()) return false;
  auto xp = fincat::share(x);
  auto yp = fincat::share(y);
  for (const auto& f : enumerate_maps(xp, yp, budget))
    if (f.is_iso()) return true;
  return x.total_cells() == 0;
}

// --- forests -----------------------------------------------------------------

std::string Forest::serialize() const {
  auto sorted = trees;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& t : sorted) out += t;
  return out;
}

namespace {

// Restriction of x to the cells whose vertices lie in one component.
Presheaf component_restriction(const Presheaf& x, const std::vector<int>& labels,
                               int component) {
  const auto& cat = *x.base();
  const int n = cat.object_count();
  const auto& data = simplex_data(n);
  std::vector<std::vector<int>> keep(n);      // new index per old cell, -1 = dropped
  std::vector<int> cards(n, 0);
  for (int k = 1; k <= n; ++k) {
    keep[k - 1].assign(x.card(k - 1), -1);
    for (int e = 0; e < x.card(k - 1); ++e) {
      // all vertices of the cell must lie in the component
      bool inside = true;
      for (auto& t : ord_maps(1, k)) {
        int v = x.act(data.find(1, k, t), e);
        if (labels[v] != component) {
          inside = false;
          break;
        }
      }
      if (inside) keep[k - 1][e] = cards[k - 1]++;
    }
  }
  std::vector<std::vector<int>> actions(cat.morphism_count());
  for (int m = 0; m < cat.morphism_count(); ++m) {
    const int src = cat.source(m), tgt = cat.target(m);
    actions[m].resize(cards[tgt]);
    for (int e = 0; e < x.card(tgt); ++e)
      if (keep[tgt][e] >= 0) actions[m][keep[tgt][e]] = keep[src][x.act(m, e)];
  }
  return Presheaf(x.base(), cards, std::move(actions));
}

}  // namespace

Forest forest_invariant(const SSetInstance& inst, const Presheaf& x) {
  Forest forest;
  if (inst.n == 1) {
    if (x.total_cells() > 0) forest.trees.push_back("()");
    return forest;
  }
  auto labels = pi0_labels(x);
  const int components = pi0(x);
  if (inst.n == 2) {
    forest.trees.assign(components, "()");
    return forest;
  }
  // n = 3: classify each component against the three pictured shapes.
  const Presheaf bare = point(3);
  const Presheaf one_loop = point_with_loops(3, 1);
  const Presheaf two_loops = point_with_loops(3, 2);
  for (int c = 0; c < components; ++c) {
    Presheaf comp = component_restriction(x, labels, c);
    Budget b(inst.model.budget);
    if (isomorphic(comp, bare, b))
      forest.trees.push_back("()");
    else if (isomorphic(comp, one_loop, b))
      forest.trees.push_back("(())");
    else if (isomorphic(comp, two_loops, b))
      forest.trees.push_back("(()())");
    else
      throw CorpusBoundError("forest_invariant: component outside the classified corpus");
  }
  return forest;
}

}  // namespace finmodel::sset
