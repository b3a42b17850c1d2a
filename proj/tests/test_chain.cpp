#include <random>
#include <set>

#include "doctest.h"
#include "finmodel/chain.hpp"

using namespace finmodel;
using chain::ChainComplex;
using chain::ChainMap;
using chain::Matrix;

namespace {

// Independent homology oracle over F_2: count kernel and image vectors by
// exhaustive enumeration; no elimination shared with the implementation.
int homology_bruteforce_f2(const ChainComplex& c, int n) {
  REQUIRE(c.p == 2);
  auto apply = [&](const Matrix& m, unsigned vec) {
    unsigned out = 0;
    for (int r = 0; r < m.rows; ++r) {
      int s = 0;
      for (int col = 0; col < m.cols; ++col) s ^= m.at(r, col) & (vec >> col);
      out |= static_cast<unsigned>(s & 1) << r;
    }
    return out;
  };
  Matrix dn = c.diff(n);
  int ker = 0;
  for (unsigned v = 0; v < (1u << c.dim(n)); ++v)
    if (apply(dn, v) == 0) ++ker;
  Matrix dn1 = c.diff(n + 1);
  std::set<unsigned> image;
  for (unsigned v = 0; v < (1u << c.dim(n + 1)); ++v) image.insert(apply(dn1, v));
  int log_ker = 0;
  while ((1 << log_ker) < ker) ++log_ker;
  int log_im = 0;
  while ((1u << log_im) < image.size()) ++log_im;
  return log_ker - log_im;
}

Matrix from_rows(int rows, int cols, std::vector<int> data) {
  Matrix m = Matrix::zero(rows, cols);
  m.data = std::move(data);
  return m;
}

// Random complex over F_2: pick differentials from the top down, each one
// sampled to vanish on the image of the previous.
ChainComplex random_complex(std::mt19937& rng, int lo, int hi, int max_dim) {
  std::uniform_int_distribution<int> dim_dist(0, max_dim);
  std::uniform_int_distribution<int> bit(0, 1);
  ChainComplex c;
  c.p = 2;
  c.lo = lo;
  c.hi = hi;
  c.dims.resize(hi - lo + 1);
  for (int& d : c.dims) d = dim_dist(rng);
  for (int n = hi; n > lo; --n) {
    // random matrix A_n -> A_{n-1} with A * d_{n+1} = 0
    Matrix prev = c.diff(n + 1);  // already chosen (or zero at the top)
    Matrix candidate = Matrix::zero(c.dim(n - 1), c.dim(n));
    // sample column space constraints via rejection on basis vectors: build
    // any matrix, then subtract its action on im(prev) by re-solving; easier
    // exactly: sample, test, retry a few times, else fall back to zero
    for (int attempt = 0; attempt < 64; ++attempt) {
      for (int& v : candidate.data) v = bit(rng);
      if (chain::is_zero(chain::mat_mul(candidate, prev, 2))) break;
      for (int& v : candidate.data) v = 0;
    }
    if (!chain::is_zero(candidate)) c.d[n] = candidate;
  }
  return c;
}

}  // namespace

TEST_CASE("homology") {
  SUBCASE("zero complex") {
    ChainComplex zero{2, 0, -1, {}, {}};
    for (int n = -2; n <= 2; ++n) CHECK(chain::homology(zero, n) == 0);
  }
  SUBCASE("two-term identity complex is acyclic") {
    ChainComplex c{2, 0, 1, {1, 1}, {}};
    c.d[1] = Matrix::identity(1);
    CHECK(c.validate().empty());
    CHECK(chain::homology(c, 0) == 0);
    CHECK(chain::homology(c, 1) == 0);
  }
  SUBCASE("two-term zero complex has one-dimensional homology in both degrees") {
    ChainComplex c{2, 0, 1, {1, 1}, {}};
    CHECK(chain::homology(c, 0) == 1);
    CHECK(chain::homology(c, 1) == 1);
    CHECK(homology_bruteforce_f2(c, 0) == 1);
    CHECK(homology_bruteforce_f2(c, 1) == 1);
  }
  SUBCASE("matches the enumeration oracle on random complexes") {
    std::mt19937 rng(12021);
    for (int trial = 0; trial < 25; ++trial) {
      auto c = random_complex(rng, -2, 2, 3);
      REQUIRE(c.validate().empty());
      for (int n = c.lo - 1; n <= c.hi + 1; ++n)
        CHECK(chain::homology(c, n) == homology_bruteforce_f2(c, n));
    }
  }
}

TEST_CASE("quasi-isomorphisms") {
  ChainComplex acyclic{2, 0, 1, {1, 1}, {}};
  acyclic.d[1] = Matrix::identity(1);
  ChainComplex zero{2, 0, -1, {}, {}};
  ChainComplex circle{2, 0, 1, {1, 1}, {}};  // zero differential

  SUBCASE("identity is a quasi-isomorphism") {
    ChainMap id{circle, circle, {}};
    id.comp[0] = Matrix::identity(1);
    id.comp[1] = Matrix::identity(1);
    CHECK(id.validate().empty());
    CHECK(chain::is_quasi_iso(id));
  }
  SUBCASE("collapse of an acyclic complex onto zero") {
    ChainMap f{acyclic, zero, {}};
    CHECK(f.validate().empty());
    CHECK(chain::is_quasi_iso(f));
  }
  SUBCASE("the zero endomap of a complex with homology is not") {
    ChainMap f{circle, circle, {}};
    CHECK(f.validate().empty());
    CHECK(!chain::is_quasi_iso(f));
  }
  SUBCASE("closed under composition on samples") {
    std::mt19937 rng(77);
    for (int trial = 0; trial < 10; ++trial) {
      auto c = random_complex(rng, -1, 1, 2);
      ChainMap id{c, c, {}};
      for (int n = c.lo; n <= c.hi; ++n)
        if (c.dim(n) > 0) id.comp[n] = Matrix::identity(c.dim(n));
      REQUIRE(chain::is_quasi_iso(id));
    }
  }
}

TEST_CASE("fibrations are dimensionwise surjections") {
  ChainComplex a{2, 0, 0, {2}, {}};
  ChainComplex b{2, 0, 0, {1}, {}};
  ChainComplex zero{2, 0, -1, {}, {}};

  SUBCASE("maps to the zero complex") {
    ChainMap f{a, zero, {}};
    CHECK(chain::is_fibration(f));
  }
  SUBCASE("identity") {
    ChainMap f{a, a, {}};
    f.comp[0] = Matrix::identity(2);
    CHECK(chain::is_fibration(f));
  }
  SUBCASE("projection onto a factor is one, the zero map is not") {
    ChainMap proj{a, b, {}};
    proj.comp[0] = from_rows(1, 2, {1, 0});
    CHECK(chain::is_fibration(proj));
    ChainMap zero_map{a, b, {}};
    CHECK(!chain::is_fibration(zero_map));
  }
  SUBCASE("a proper subspace inclusion fails in that degree") {
    ChainMap inc{b, a, {}};
    inc.comp[0] = from_rows(2, 1, {1, 0});
    CHECK(!chain::is_fibration(inc));
  }
}

TEST_CASE("truncation") {
  SUBCASE("stage 0 of a complex concentrated in degree 0 doubles it") {
    ChainComplex c{2, 0, 0, {2}, {}};
    auto t = chain::truncate(c, 0);
    CHECK(t.dim(0) == 2);
    CHECK(t.dim(-1) == 2);
    CHECK(t.diff(0) == Matrix::identity(2));
    CHECK(t.validate().empty());
  }
  SUBCASE("zero complex truncates to zero") {
    ChainComplex zero{2, 0, -1, {}, {}};
    auto t = chain::truncate(zero, 2);
    for (int n = -4; n <= 4; ++n) CHECK(t.dim(n) == 0);
  }
  SUBCASE("a covering stage reproduces the complex away from the tail degree") {
    ChainComplex c{2, -1, 1, {1, 2, 1}, {}};
    c.d[1] = from_rows(2, 1, {1, 0});
    c.d[0] = from_rows(1, 2, {0, 1});
    REQUIRE(c.validate().empty());
    auto t = chain::truncate(c, 2);
    for (int n = -1; n <= 2; ++n) {
      CHECK(t.dim(n) == c.dim(n));
      if (n > -2) CHECK(t.diff(n + 0).data == c.diff(n).data);
    }
    CHECK(t.dim(-3) == c.dim(-2));
  }
  SUBCASE("stages are complexes exactly when the seam differential vanishes") {
    // the copied tail forces d.d = d(-k+1) at the seam, so a stage is a
    // complex iff that differential is zero
    ChainComplex c{2, -1, 1, {1, 1, 1}, {}};
    c.d[0] = Matrix::identity(1);  // nonzero differential at degree 0
    REQUIRE(c.validate().empty());
    CHECK(!chain::truncate(c, 1).validate().empty());  // seam at -1, d(0) != 0
    CHECK(chain::truncate(c, 2).validate().empty());   // seam below support
  }
  SUBCASE("interior homology is preserved") {
    std::mt19937 rng(4242);
    for (int trial = 0; trial < 20; ++trial) {
      auto c = random_complex(rng, -3, 3, 3);
      for (int k = 0; k <= 4; ++k) {
        auto t = chain::truncate(c, k);
        for (int n = -k + 1; n < k; ++n)
          CHECK(chain::homology(t, n) == chain::homology(c, n));
      }
    }
  }
}

TEST_CASE("truncation colimit verification") {
  SUBCASE("passes at a covering stage") {
    ChainComplex c{2, -1, 1, {1, 2, 1}, {}};
    c.d[1] = from_rows(2, 1, {1, 0});
    c.d[0] = from_rows(1, 2, {0, 1});
    auto report = chain::verify_truncation_colimit(c, 2);
    CHECK(report.pass());
  }
  SUBCASE("zero complex passes at stage 1") {
    ChainComplex zero{2, 0, -1, {}, {}};
    CHECK(chain::verify_truncation_colimit(zero, 1).pass());
  }
  SUBCASE("a stage below the support is explicitly too small") {
    ChainComplex c{2, -2, 2, {1, 1, 1, 1, 1}, {}};
    auto report = chain::verify_truncation_colimit(c, 1);
    CHECK(report.status == chain::ColimitReport::Status::TooSmall);
  }
  SUBCASE("a corrupted connecting map breaks coherence at the tail degree") {
    ChainComplex c{2, -1, 0, {1, 1}, {}};
    c.d[0] = Matrix::identity(1);
    REQUIRE(c.validate().empty());
    auto g = chain::truncation_connecting(c, 0);
    // the degree -1 component must be d(0); zero it out
    g.comp[-1] = Matrix::zero(1, 1);
    auto f0 = chain::truncation_cocone(c, 0);
    auto f1 = chain::truncation_cocone(c, 1);
    bool coherent = true;
    int offending = 99;
    for (int n = -2; n <= 1; ++n) {
      if (!(chain::mat_mul(f1.component(n), g.component(n), 2) == f0.component(n))) {
        coherent = false;
        offending = n;
        break;
      }
    }
    CHECK(!coherent);
    CHECK(offending == -1);
    // the uncorrupted chain is coherent
    CHECK(chain::verify_truncation_colimit(c, 2).pass());
  }
}
