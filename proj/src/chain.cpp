#include "finmodel/chain.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

namespace finmodel::chain {

namespace {

int mod_pow(int base, int exp, int p) {
  long long r = 1, b = base % p;
  while (exp > 0) {
    if (exp & 1) r = r * b % p;
    b = b * b % p;
    exp >>= 1;
  }
  return static_cast<int>(r);
}

int inv_mod(int a, int p) { return mod_pow(((a % p) + p) % p, p - 2, p); }

// Row-reduce in place; returns pivot columns.
std::vector<int> rref(Matrix& m, int p) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    int pivot = -1;
    for (int r = row; r < m.rows; ++r)
      if (m.at(r, col) != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    for (int c = 0; c < m.cols; ++c) std::swap(m.at(row, c), m.at(pivot, c));
    int inv = inv_mod(m.at(row, col), p);
    for (int c = 0; c < m.cols; ++c) m.at(row, c) = static_cast<int>(1LL * m.at(row, c) * inv % p);
    for (int r = 0; r < m.rows; ++r) {
      if (r == row || m.at(r, col) == 0) continue;
      int factor = m.at(r, col);
      for (int c = 0; c < m.cols; ++c)
        m.at(r, c) = ((m.at(r, c) - 1LL * factor * m.at(row, c)) % p + p) % p;
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

// Columns spanning the kernel of m.
Matrix kernel_basis(Matrix m, int p) {
  auto pivots = rref(m, p);
  std::vector<char> is_pivot(m.cols, 0);
  for (int c : pivots) is_pivot[c] = 1;
  std::vector<int> free_cols;
  for (int c = 0; c < m.cols; ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  Matrix basis = Matrix::zero(m.cols, static_cast<int>(free_cols.size()));
  for (std::size_t j = 0; j < free_cols.size(); ++j) {
    basis.at(free_cols[j], static_cast<int>(j)) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      int v = m.at(static_cast<int>(r), free_cols[j]);
      basis.at(pivots[r], static_cast<int>(j)) = (p - v) % p;
    }
  }
  return basis;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.rows != b.rows) throw std::invalid_argument("hstack: row mismatch");
  Matrix out = Matrix::zero(a.rows, a.cols + b.cols);
  for (int r = 0; r < a.rows; ++r) {
    for (int c = 0; c < a.cols; ++c) out.at(r, c) = a.at(r, c);
    for (int c = 0; c < b.cols; ++c) out.at(r, a.cols + c) = b.at(r, c);
  }
  return out;
}

}  // namespace

Matrix Matrix::zero(int rows, int cols) {
  Matrix m;
  m.rows = rows;
  m.cols = cols;
  m.data.assign(static_cast<std::size_t>(rows) * cols, 0);
  return m;
}

Matrix Matrix::identity(int n) {
  Matrix m = zero(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

Matrix mat_mul(const Matrix& a, const Matrix& b, int p) {
  if (a.cols != b.rows) throw std::invalid_argument("mat_mul: shape mismatch");
  Matrix out = Matrix::zero(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      int v = a.at(i, k);
      if (v == 0) continue;
      for (int j = 0; j < b.cols; ++j)
        out.at(i, j) = static_cast<int>((out.at(i, j) + 1LL * v * b.at(k, j)) % p);
    }
  return out;
}

int mat_rank(Matrix m, int p) { return static_cast<int>(rref(m, p).size()); }

bool is_zero(const Matrix& m) {
  return std::all_of(m.data.begin(), m.data.end(), [](int v) { return v == 0; });
}

int ChainComplex::dim(int n) const {
  if (n < lo || n > hi) return 0;
  return dims[n - lo];
}

Matrix ChainComplex::diff(int n) const {
  auto it = d.find(n);
  if (it != d.end()) return it->second;
  return Matrix::zero(dim(n - 1), dim(n));
}

std::vector<std::string> ChainComplex::validate() const {
  std::vector<std::string> report;
  if (hi >= lo && static_cast<int>(dims.size()) != hi - lo + 1)
    report.push_back("dims length does not match support");
  for (const auto& [n, m] : d) {
    if (m.rows != dim(n - 1) || m.cols != dim(n))
      report.push_back("differential at degree " + std::to_string(n) + " has wrong shape");
    for (int v : m.data)
      if (v < 0 || v >= p) report.push_back("entry out of field range at degree " + std::to_string(n));
  }
  for (int n = lo; n <= hi + 1; ++n) {
    Matrix a = diff(n - 0), b = diff(n + 1);
    if (a.rows == dim(n - 1) && a.cols == dim(n) && b.rows == dim(n) && b.cols == dim(n + 1)) {
      if (!is_zero(mat_mul(a, b, p)))
        report.push_back("d.d != 0 at degree " + std::to_string(n));
    }
  }
  return report;
}

Matrix ChainMap::component(int n) const {
  auto it = comp.find(n);
  if (it != comp.end()) return it->second;
  return Matrix::zero(target.dim(n), source.dim(n));
}

std::vector<std::string> ChainMap::validate() const {
  std::vector<std::string> report;
  if (source.p != target.p) report.push_back("field mismatch");
  for (const auto& [n, m] : comp)
    if (m.rows != target.dim(n) || m.cols != source.dim(n))
      report.push_back("component at degree " + std::to_string(n) + " has wrong shape");
  if (!report.empty()) return report;
  int from = std::min(source.lo, target.lo) - 1;
  int to = std::max(source.hi, target.hi) + 1;
  for (int n = from; n <= to; ++n) {
    Matrix lhs = mat_mul(component(n - 1), source.diff(n), source.p);
    Matrix rhs = mat_mul(target.diff(n), component(n), source.p);
    if (!(lhs == rhs))
      report.push_back("chain-map square fails at degree " + std::to_string(n));
  }
  return report;
}

int homology(const ChainComplex& c, int n) {
  int ker = c.dim(n) - mat_rank(c.diff(n), c.p);
  int im = mat_rank(c.diff(n + 1), c.p);
  return ker - im;
}

bool is_quasi_iso(const ChainMap& f) {
  const int p = f.source.p;
  int from = std::min(f.source.lo, f.target.lo) - 1;
  int to = std::max(f.source.hi, f.target.hi) + 1;
  for (int n = from; n <= to; ++n) {
    int hs = homology(f.source, n);
    int ht = homology(f.target, n);
    if (hs != ht) return false;
    if (hs == 0) continue;
    // induced map injective on homology: the image of f(ker basis) together
    // with the target boundaries must have rank (rank boundaries) + hs
    Matrix ks = kernel_basis(f.source.diff(n), p);
    Matrix img = mat_mul(f.component(n), ks, p);
    Matrix bt = f.target.diff(n + 1);
    int r_b = mat_rank(bt, p);
    int r_all = mat_rank(hstack(img, bt), p);
    if (r_all - r_b != hs) return false;
  }
  return true;
}

bool is_fibration(const ChainMap& f) {
  for (int n = f.target.lo; n <= f.target.hi; ++n)
    if (mat_rank(f.component(n), f.source.p) != f.target.dim(n)) return false;
  return true;
}

ChainComplex truncate(const ChainComplex& c, int k) {
  if (k < 0) throw std::invalid_argument("truncate: k must be >= 0");
  ChainComplex out;
  out.p = c.p;
  out.lo = -k - 1;
  out.hi = k;
  out.dims.assign(2 * k + 2, 0);
  for (int n = -k; n <= k; ++n) out.dims[n - out.lo] = c.dim(n);
  out.dims[0] = c.dim(-k);  // degree -k-1 carries a copy of A_{-k}
  for (int n = -k + 1; n <= k; ++n) {
    Matrix m = c.diff(n);
    if (!is_zero(m)) out.d[n] = m;
  }
  out.d[-k] = Matrix::identity(c.dim(-k));
  return out;
}

ChainMap truncation_connecting(const ChainComplex& c, int k) {
  ChainMap f;
  f.source = truncate(c, k);
  f.target = truncate(c, k + 1);
  for (int n = -k; n <= k; ++n)
    if (c.dim(n) > 0) f.comp[n] = Matrix::identity(c.dim(n));
  Matrix bottom = c.diff(-k);
  if (!is_zero(bottom)) f.comp[-k - 1] = bottom;
  return f;
}

ChainMap truncation_cocone(const ChainComplex& c, int k) {
  ChainMap f;
  f.source = truncate(c, k);
  f.target = c;
  for (int n = -k; n <= k; ++n)
    if (c.dim(n) > 0) f.comp[n] = Matrix::identity(c.dim(n));
  Matrix bottom = c.diff(-k);
  if (!is_zero(bottom)) f.comp[-k - 1] = bottom;
  return f;
}

ColimitReport verify_truncation_colimit(const ChainComplex& c, int K) {
  ColimitReport report;
  const bool empty_support = c.hi < c.lo;
  if (!empty_support && (K < c.hi || -K >= c.lo)) {
    report.status = ColimitReport::Status::TooSmall;
    report.notes.push_back("stage " + std::to_string(K) + " does not cover support [" +
                           std::to_string(c.lo) + ", " + std::to_string(c.hi) + "]");
    return report;
  }
  // Cocone components must be chain maps into c.
  for (int k = 0; k <= K; ++k) {
    auto errs = truncation_cocone(c, k).validate();
    if (!errs.empty()) {
      report.status = ColimitReport::Status::Fail;
      report.notes.push_back("stage " + std::to_string(k) + ": " + errs.front());
      return report;
    }
  }
  // Cocone components commute with the connecting maps.
  for (int k = 0; k < K; ++k) {
    ChainMap g = truncation_connecting(c, k);
    ChainMap fk = truncation_cocone(c, k);
    ChainMap fk1 = truncation_cocone(c, k + 1);
    for (int n = -k - 2; n <= k + 1; ++n) {
      Matrix lhs = mat_mul(fk1.component(n), g.component(n), c.p);
      if (!(lhs == fk.component(n))) {
        report.status = ColimitReport::Status::Fail;
        report.notes.push_back("cocone incoherent through stage " + std::to_string(k) +
                               " at degree " + std::to_string(n));
        return report;
      }
    }
  }
  // The stage-K component is an isomorphism onto c in the supported range.
  ChainComplex stage = truncate(c, K);
  ChainMap fk = truncation_cocone(c, K);
  for (int n = stage.lo; n <= stage.hi; ++n) {
    if (n >= c.lo && n <= c.hi) {
      if (stage.dim(n) != c.dim(n) || !(fk.component(n) == Matrix::identity(c.dim(n)))) {
        report.status = ColimitReport::Status::Fail;
        report.notes.push_back("stage-" + std::to_string(K) +
                               " component not an isomorphism at degree " + std::to_string(n));
        return report;
      }
    } else if (stage.dim(n) != 0) {
      report.status = ColimitReport::Status::Fail;
      report.notes.push_back("stage " + std::to_string(K) + " has excess cells at degree " +
                             std::to_string(n));
      return report;
    }
  }
  report.notes.push_back("colimit verified through stage " + std::to_string(K));
  return report;
}

}  // namespace finmodel::chain
