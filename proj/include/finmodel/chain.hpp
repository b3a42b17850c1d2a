#pragma once

#include <map>
#include <string>
#include <vector>

namespace finmodel::chain {

/// Dense matrix over the prime field F_p, row-major. rows x cols may be 0.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> data;  // entries in [0, p)

  int& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  int at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  static Matrix zero(int rows, int cols);
  static Matrix identity(int n);
  bool operator==(const Matrix& other) const = default;
};

Matrix mat_mul(const Matrix& a, const Matrix& b, int p);
int mat_rank(Matrix m, int p);
bool is_zero(const Matrix& m);

/// A bounded chain complex over F_p. Degrees outside [lo, hi] are zero;
/// d(n): A_n -> A_{n-1} has dim(n-1) rows and dim(n) columns.
struct ChainComplex {
  int p = 2;
  int lo = 0;
  int hi = -1;  // empty support when hi < lo
  std::vector<int> dims;
  std::map<int, Matrix> d;

  int dim(int n) const;
  Matrix diff(int n) const;  // zero matrix of the right shape when absent

  /// d.d = 0 and shape violations, one line each.
  std::vector<std::string> validate() const;
};

struct ChainMap {
  ChainComplex source;
  ChainComplex target;
  std::map<int, Matrix> comp;  // degreewise components; absent means zero

  Matrix component(int n) const;
  std::vector<std::string> validate() const;  // chain-map squares + shapes
};

/// dim ker d(n) - rank d(n+1), by exact rank computation.
int homology(const ChainComplex& c, int n);

/// True iff the induced maps on homology are isomorphisms in every degree of
/// the joint support.
bool is_quasi_iso(const ChainMap& f);

/// Dimensionwise surjectivity: full row rank in every degree.
bool is_fibration(const ChainMap& f);

/// The k-th truncation stage: degrees -k..k copy the input, degree -k-1
/// carries an extra copy of A_{-k} with identity differential into it.
ChainComplex truncate(const ChainComplex& c, int k);

/// Connecting map of the truncation chain, stage k -> stage k+1: identity on
/// -k..k and d(-k) in degree -k-1.
ChainMap truncation_connecting(const ChainComplex& c, int k);

/// Cocone component stage k -> c: identity on -k..k and d(-k) in degree -k-1.
ChainMap truncation_cocone(const ChainComplex& c, int k);

struct ColimitReport {
  enum class Status { Pass, TooSmall, Fail };
  Status status = Status::Pass;
  std::vector<std::string> notes;

  bool pass() const { return status == Status::Pass; }
};

/// Checks that the stage-K cocone component is an isomorphism onto c in the
/// supported range and that cocone components commute with the connecting
/// maps below K. K must cover the support, otherwise an explicit TooSmall
/// report comes back.
ColimitReport verify_truncation_colimit(const ChainComplex& c, int K);

}  // namespace finmodel::chain
