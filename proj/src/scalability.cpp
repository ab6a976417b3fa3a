#include "dimwit/scalability.hpp"

#include <stdexcept>

#include "dimwit/witness.hpp"

namespace dimwit {

namespace {

void require_fidelity(double f) {
  if (!(f > 0.0 && f <= 1.0)) {
    throw std::domain_error("fidelity must lie in (0, 1], got " + std::to_string(f));
  }
}

std::string missing_list(const std::vector<std::pair<int, int>>& missing) {
  std::string s;
  for (const auto& [n, d] : missing) {
    if (!s.empty()) s += ", ";
    s += "(N=" + std::to_string(n) + ", d=" + std::to_string(d) + ")";
  }
  return s;
}

}  // namespace

FidelityInterval interval(int n, int d, double fidelity, double quantum_bound) {
  require_fidelity(fidelity);
  if (!(quantum_bound > 0.0)) throw std::domain_error("quantum bound must be positive");
  FidelityInterval out;
  out.n = n;
  out.d = d;
  out.fidelity = fidelity;
  out.i_min = fidelity * quantum_bound;
  out.i_max = out.i_min + (1.0 - fidelity) * algebraic_max(n);
  return out;
}

void BoundTable::set(int n, int d, double value, std::string config_hash) {
  entries_[{n, d}] = Entry{n, d, value, std::move(config_hash)};
}

std::optional<double> BoundTable::get(int n, int d) const {
  auto it = entries_.find({n, d});
  if (it == entries_.end()) return std::nullopt;
  return it->second.value;
}

std::vector<BoundTable::Entry> BoundTable::stale_entries(const std::string& config_hash) const {
  std::vector<Entry> out;
  for (const auto& [key, e] : entries_) {
    if (e.config_hash != config_hash) out.push_back(e);
  }
  return out;
}

bool separable(int n, int d, double fidelity, const BoundTable& bounds) {
  require_fidelity(fidelity);
  const auto lo = bounds.get(n, d - 1);
  const auto hi = bounds.get(n, d);
  if (!lo || !hi) {
    std::vector<std::pair<int, int>> missing;
    if (!lo) missing.emplace_back(n, d - 1);
    if (!hi) missing.emplace_back(n, d);
    throw std::domain_error("missing quantum bounds: " + missing_list(missing));
  }
  return interval(n, d - 1, fidelity, *lo).i_max < interval(n, d, fidelity, *hi).i_min;
}

bool separable(int d, double fidelity, const BoundTable& bounds) {
  return separable(d + 1, d, fidelity, bounds);
}

CertifiableDimension max_certifiable_dimension(double fidelity, const BoundTable& bounds, int d_lo,
                                               int d_hi) {
  require_fidelity(fidelity);
  if (d_lo < 2 || d_hi < d_lo) throw std::domain_error("invalid dimension range");
  std::vector<std::pair<int, int>> missing;
  for (int d = d_lo; d <= d_hi; ++d) {
    if (!bounds.contains(d + 1, d - 1)) missing.emplace_back(d + 1, d - 1);
    if (!bounds.contains(d + 1, d)) missing.emplace_back(d + 1, d);
  }
  if (!missing.empty()) throw std::domain_error("missing quantum bounds: " + missing_list(missing));

  CertifiableDimension out;
  out.fidelity = fidelity;
  bool failed_before = false;
  for (int d = d_lo; d <= d_hi; ++d) {
    const int n = d + 1;
    SeparabilityRow row;
    row.d = d;
    row.n = n;
    row.lower = interval(n, d - 1, fidelity, *bounds.get(n, d - 1));
    row.upper = interval(n, d, fidelity, *bounds.get(n, d));
    row.margin = row.upper.i_min - row.lower.i_max;
    row.separable = row.lower.i_max < row.upper.i_min;
    if (row.separable) {
      if (failed_before) out.contiguous = false;
      out.max_dimension = d;
    } else {
      failed_before = true;
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace dimwit
