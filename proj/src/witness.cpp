#include "dimwit/witness.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dimwit {

namespace {

constexpr double kProbabilityTolerance = 1e-12;

void require_n(int n) {
  if (n < 3) {
    throw std::domain_error("witness size N must be at least 3, got " + std::to_string(n));
  }
}

}  // namespace

WitnessSpec::WitnessSpec(int n) : n_(n) {
  require_n(n);
  dense_.assign(static_cast<std::size_t>(n) * (n - 1), 0);
  // Row 1 has every measurement with sign +1; rows i >= 2 stop at
  // j = N+1-i and flip sign once i + j exceeds N.
  for (int i = 1; i <= n; ++i) {
    const int last = (i == 1) ? n - 1 : n + 1 - i;
    for (int j = 1; j <= last; ++j) {
      const int s = (i == 1 || i + j <= n) ? 1 : -1;
      terms_.push_back({i, j, s});
      dense_[static_cast<std::size_t>(i - 1) * (n - 1) + (j - 1)] = s;
    }
  }
}

bool WitnessSpec::contains(int i, int j) const {
  if (i < 1 || i > n_ || j < 1 || j > n_ - 1) return false;
  return dense_[static_cast<std::size_t>(i - 1) * (n_ - 1) + (j - 1)] != 0;
}

int WitnessSpec::sign(int i, int j) const {
  if (!contains(i, j)) {
    throw std::domain_error("pair (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") is not a term of I_" + std::to_string(n_));
  }
  return dense_[static_cast<std::size_t>(i - 1) * (n_ - 1) + (j - 1)];
}

WitnessSpec make_witness(int n) { return WitnessSpec(n); }

CorrelatorTable::CorrelatorTable(int n, std::vector<double> e) : n_(n), e_(std::move(e)) {
  require_n(n);
  if (e_.size() != static_cast<std::size_t>(n) * (n - 1)) {
    throw std::domain_error("correlator table for N=" + std::to_string(n) + " needs " +
                            std::to_string(n * (n - 1)) + " entries, got " +
                            std::to_string(e_.size()));
  }
  for (double v : e_) {
    if (!(v >= -1.0 && v <= 1.0)) {
      throw std::domain_error("correlator outside [-1, 1]: " + std::to_string(v));
    }
  }
}

CorrelatorTable::CorrelatorTable(int n, std::vector<double> e, std::vector<double> p_plus)
    : CorrelatorTable(n, std::move(e)) {
  if (p_plus.size() != e_.size()) {
    throw std::domain_error("probability table size does not match correlators");
  }
  for (std::size_t k = 0; k < e_.size(); ++k) {
    const double p = p_plus[k];
    if (!(p >= 0.0 && p <= 1.0) ||
        std::abs(e_[k] - (p - (1.0 - p))) > kProbabilityTolerance) {
      throw std::domain_error("correlator inconsistent with P(+1|x,y)");
    }
  }
  p_ = std::move(p_plus);
}

CorrelatorTable CorrelatorTable::from_probabilities(int n, std::vector<double> p_plus) {
  std::vector<double> e(p_plus.size());
  for (std::size_t k = 0; k < p_plus.size(); ++k) {
    const double p = p_plus[k];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::domain_error("probability outside [0, 1]: " + std::to_string(p));
    }
    e[k] = p - (1.0 - p);
  }
  return CorrelatorTable(n, std::move(e), std::move(p_plus));
}

std::size_t CorrelatorTable::index(int x, int y) const {
  if (x < 1 || x > n_ || y < 1 || y > n_ - 1) {
    throw std::domain_error("correlator index (" + std::to_string(x) + ", " + std::to_string(y) +
                            ") out of range");
  }
  return static_cast<std::size_t>(x - 1) * (n_ - 1) + (y - 1);
}

double CorrelatorTable::e(int x, int y) const { return e_[index(x, y)]; }

std::optional<double> CorrelatorTable::p_plus(int x, int y) const {
  if (!p_) return std::nullopt;
  return (*p_)[index(x, y)];
}

double signed_value(const WitnessSpec& spec, const CorrelatorTable& table) {
  if (spec.n() != table.n()) {
    throw std::domain_error("witness N=" + std::to_string(spec.n()) +
                            " does not match table N=" + std::to_string(table.n()));
  }
  double sum = 0.0;
  for (const Term& t : spec.terms()) sum += t.sign * table.e(t.i, t.j);
  return sum;
}

double evaluate(const WitnessSpec& spec, const CorrelatorTable& table) {
  return std::abs(signed_value(spec, table));
}

double classical_bound(int n, int d) {
  require_n(n);
  if (d < 1 || d > n - 1) {
    throw std::domain_error("classical bound needs 1 <= d <= N-1, got d=" + std::to_string(d) +
                            " for N=" + std::to_string(n));
  }
  return static_cast<double>(n * (n - 3) / 2 + 2 * d - 1);
}

double algebraic_max(int n) {
  require_n(n);
  return static_cast<double>((n + 2) * (n - 1) / 2);
}

CertificationVerdict certify(double value, int n,
                             std::span<const std::pair<int, double>> quantum_bounds) {
  require_n(n);
  if (quantum_bounds.empty()) throw std::domain_error("certify needs at least one quantum bound");
  for (std::size_t k = 0; k < quantum_bounds.size(); ++k) {
    const int d = quantum_bounds[k].first;
    if (d != static_cast<int>(k) + 2) {
      throw std::domain_error("quantum bounds must be sorted and cover d = 2..N-1 without gaps");
    }
  }
  if (quantum_bounds.back().first != n - 1) {
    throw std::domain_error("quantum bounds must cover d = 2..N-1 for N=" + std::to_string(n));
  }

  CertificationVerdict verdict;
  verdict.witness_value = value;
  bool found = false;
  for (const auto& [d, q] : quantum_bounds) {
    verdict.bounds_used.push_back({d, classical_bound(n, d), q});
    if (!found && q >= value) {
      verdict.min_quantum_dimension = d;
      found = true;
    }
  }
  if (!found) {
    verdict.min_quantum_dimension = quantum_bounds.back().first;
    verdict.exceeds_all_quantum_bounds = true;
  }
  for (int d = n - 1; d >= 1; --d) {
    if (classical_bound(n, d) < value) {
      verdict.exceeds_classical_at = d;
      break;
    }
  }
  return verdict;
}

}  // namespace dimwit
