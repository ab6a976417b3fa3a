#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dimwit {

// Range of witness values reachable when a fraction 1-F of the runs land
// anywhere between the algebraic extremes 0 and (N+2)(N-1)/2.
struct FidelityInterval {
  int n = 0;
  int d = 0;
  double fidelity = 1.0;
  double i_min = 0.0;  // F * I_Nq
  double i_max = 0.0;  // F * I_Nq + (1 - F) * (N+2)(N-1)/2
};

FidelityInterval interval(int n, int d, double fidelity, double quantum_bound);

// Quantum bounds keyed by (N, d).
class BoundTable {
 public:
  struct Entry {
    int n = 0;
    int d = 0;
    double value = 0.0;
    std::string config_hash;
  };

  void set(int n, int d, double value, std::string config_hash);
  std::optional<double> get(int n, int d) const;
  bool contains(int n, int d) const { return get(n, d).has_value(); }
  const std::map<std::pair<int, int>, Entry>& entries() const { return entries_; }

  // Entries whose hash differs from the given one.
  std::vector<Entry> stale_entries(const std::string& config_hash) const;

 private:
  std::map<std::pair<int, int>, Entry> entries_;
};

// Whether I_{d+1} separates dimension d from d-1 at fidelity F, i.e. the
// (d-1)-dimensional I_max stays below the d-dimensional I_min. Throws
// std::domain_error naming the missing bounds.
bool separable(int d, double fidelity, const BoundTable& bounds);
bool separable(int n, int d, double fidelity, const BoundTable& bounds);

struct SeparabilityRow {
  int d = 0;
  int n = 0;
  FidelityInterval lower;  // dimension d-1
  FidelityInterval upper;  // dimension d
  double margin = 0.0;     // upper.i_min - lower.i_max
  bool separable = false;
};

struct CertifiableDimension {
  double fidelity = 1.0;
  std::optional<int> max_dimension;  // largest separable d in range
  bool contiguous = true;            // passing d form a prefix of the range
  std::vector<SeparabilityRow> rows;
};

// Scans d in [d_lo, d_hi] using I_{d+1}. Throws std::domain_error listing
// every missing (N, d) bound.
CertifiableDimension max_certifiable_dimension(double fidelity, const BoundTable& bounds, int d_lo,
                                               int d_hi);

}  // namespace dimwit
