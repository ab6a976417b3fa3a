#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dimwit {

// One signed correlator E_ij in the witness sum. Indices are 1-based.
struct Term {
  int i = 0;  // preparation
  int j = 0;  // measurement
  int sign = 1;
};

// The I_N witness: N preparations, N-1 binary measurements, and the
// sign pattern of the family. Immutable after construction.
class WitnessSpec {
 public:
  explicit WitnessSpec(int n);

  int n() const { return n_; }
  int measurements() const { return n_ - 1; }
  std::span<const Term> terms() const { return terms_; }

  bool contains(int i, int j) const;
  // Throws std::domain_error when (i, j) is not a term.
  int sign(int i, int j) const;

  // Dense N x (N-1) row-major sign matrix with 0 for absent pairs.
  std::span<const int> sign_matrix() const { return dense_; }

 private:
  int n_;
  std::vector<Term> terms_;
  std::vector<int> dense_;
};

WitnessSpec make_witness(int n);

// E_xy for x in 1..N, y in 1..N-1, optionally backed by P(+1|x,y).
class CorrelatorTable {
 public:
  // Row-major N x (N-1). Validates E in [-1, 1].
  CorrelatorTable(int n, std::vector<double> e);
  // Builds E = 2 P(+1) - 1 from probabilities and keeps P.
  static CorrelatorTable from_probabilities(int n, std::vector<double> p_plus);
  // Validates the stored E and P agree.
  CorrelatorTable(int n, std::vector<double> e, std::vector<double> p_plus);

  int n() const { return n_; }
  double e(int x, int y) const;
  std::optional<double> p_plus(int x, int y) const;
  std::span<const double> values() const { return e_; }
  const std::optional<std::vector<double>>& probabilities() const { return p_; }

 private:
  std::size_t index(int x, int y) const;

  int n_;
  std::vector<double> e_;
  std::optional<std::vector<double>> p_;
};

// Signed sum of sign(i,j) E_ij. Optimizers work on this; it is smooth.
double signed_value(const WitnessSpec& spec, const CorrelatorTable& table);
// |signed_value|, the reported witness value.
double evaluate(const WitnessSpec& spec, const CorrelatorTable& table);

// L_d = N(N-3)/2 + 2d - 1, for 1 <= d <= N-1.
double classical_bound(int n, int d);
// (N+2)(N-1)/2.
double algebraic_max(int n);

struct BoundRow {
  int d = 0;
  double classical = 0.0;
  double quantum = 0.0;
};

struct CertificationVerdict {
  int min_quantum_dimension = 0;
  // Set when the value is above every supplied quantum bound; the
  // reported dimension is then the largest one supplied.
  bool exceeds_all_quantum_bounds = false;
  std::optional<int> exceeds_classical_at;
  double witness_value = 0.0;
  std::vector<BoundRow> bounds_used;
};

// quantum_bounds: (d, I_Nq(d)) sorted by d, covering 2..N-1.
CertificationVerdict certify(double value, int n,
                             std::span<const std::pair<int, double>> quantum_bounds);

}  // namespace dimwit
