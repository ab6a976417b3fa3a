#include "dimwit/experiment_sim.hpp"

#include <cmath>
#include <random>
#include <string>

#include "dimwit/rng.hpp"

namespace dimwit {

namespace {

std::vector<double> amplitudes(const AngleVector& a) { return angles_to_state(a).amplitudes; }

// Measured basis for y: the projector state first, then its completion.
std::vector<std::vector<double>> measurement_basis(const AngleEnsemble& e, int y) {
  RealStateVector m = angles_to_state(e.measurements[static_cast<std::size_t>(y - 1)]);
  std::vector<std::vector<double>> basis{m.amplitudes};
  for (auto& v : complete_basis(m)) basis.push_back(std::move(v.amplitudes));
  return basis;
}

std::int64_t poisson(std::mt19937_64& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::int64_t> dist(mean);
  return dist(rng);
}

struct RatioEstimate {
  double p = 0.0;
  double variance = 0.0;
};

// p = c_1 / sum c_k with c_k = n_k or max(n_k - dark, 0). Var(n_k) is
// estimated by n_k.
RatioEstimate ratio(std::span<const std::int64_t> n, double dark, bool correct) {
  std::vector<double> c(n.size());
  double total = 0.0;
  for (std::size_t k = 0; k < n.size(); ++k) {
    const double raw = static_cast<double>(n[k]);
    c[k] = correct ? std::max(raw - dark, 0.0) : raw;
    total += c[k];
  }
  RatioEstimate r;
  if (!(total > 0.0)) return r;
  r.p = c[0] / total;
  for (std::size_t k = 0; k < n.size(); ++k) {
    const bool active = !correct || static_cast<double>(n[k]) > dark;
    if (!active) continue;
    const double deriv = (k == 0 ? (total - c[0]) : -c[0]) / (total * total);
    r.variance += deriv * deriv * static_cast<double>(n[k]);
  }
  return r;
}

double total_after_correction(std::span<const std::int64_t> n, double dark, bool correct) {
  double total = 0.0;
  for (auto v : n) total += correct ? std::max(static_cast<double>(v) - dark, 0.0) : v;
  return total;
}

}  // namespace

void NoiseModel::validate() const {
  if (!(fidelity > 0.0 && fidelity <= 1.0)) {
    throw std::domain_error("fidelity must lie in (0, 1], got " + std::to_string(fidelity));
  }
  if (!(dark_rate >= 0.0) || !(signal_rate >= 0.0)) {
    throw std::domain_error("count rates must be non-negative");
  }
}

CountRecord::CountRecord(int n_, int d_) : n(n_), d(d_) {
  if (n < 3 || d < 2) throw std::domain_error("count record needs N >= 3 and d >= 2");
  counts.assign(static_cast<std::size_t>(n) * (n - 1) * d, 0);
}

std::int64_t& CountRecord::at(int x, int y, int k) {
  if (x < 1 || x > n || y < 1 || y > n - 1 || k < 1 || k > d) {
    throw std::domain_error("count index out of range");
  }
  return counts[(static_cast<std::size_t>(x - 1) * (n - 1) + (y - 1)) * d + (k - 1)];
}

std::int64_t CountRecord::at(int x, int y, int k) const {
  return const_cast<CountRecord&>(*this).at(x, y, k);
}

std::span<const std::int64_t> CountRecord::basis_counts(int x, int y) const {
  if (x < 1 || x > n || y < 1 || y > n - 1) throw std::domain_error("count index out of range");
  const std::size_t offset = (static_cast<std::size_t>(x - 1) * (n - 1) + (y - 1)) * d;
  return {counts.data() + offset, static_cast<std::size_t>(d)};
}

void CountRecord::validate() const {
  if (counts.size() != static_cast<std::size_t>(n) * (n - 1) * d) {
    throw std::domain_error("count record has the wrong number of tallies");
  }
  for (auto c : counts) {
    if (c < 0) throw std::domain_error("negative count in record");
  }
  noise.validate();
}

std::vector<double> basis_probabilities(const AngleEnsemble& e, int x, int y, double fidelity) {
  e.validate();
  if (x < 1 || x > e.n || y < 1 || y > e.n - 1) {
    throw std::domain_error("no preparation " + std::to_string(x) + " / measurement " +
                            std::to_string(y) + " in this ensemble");
  }
  const auto basis = measurement_basis(e, y);
  const auto psi = amplitudes(e.preparations[static_cast<std::size_t>(x - 1)]);
  std::vector<double> p(basis.size());
  const double white = (1.0 - fidelity) / e.d;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    double ideal = 0.0;
    if (e.model == Model::quantum) {
      double o = 0.0;
      for (int i = 0; i < e.d; ++i) o += psi[i] * basis[k][i];
      ideal = o * o;
    } else {
      for (int i = 0; i < e.d; ++i) ideal += psi[i] * psi[i] * basis[k][i] * basis[k][i];
    }
    p[k] = fidelity * ideal + white;
  }
  return p;
}

CountRecord simulate_counts(const AngleEnsemble& e, const NoiseModel& noise, std::uint64_t seed) {
  e.validate();
  noise.validate();
  CountRecord rec(e.n, e.d);
  rec.model = e.model;
  rec.noise = noise;
  rec.seed = seed;
  for (int x = 1; x <= e.n; ++x) {
    for (int y = 1; y <= e.n - 1; ++y) {
      std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(x) * 1000 + y));
      const auto p = basis_probabilities(e, x, y, noise.fidelity);
      for (int k = 1; k <= e.d; ++k) {
        rec.at(x, y, k) = poisson(rng, noise.signal_rate * p[k - 1] + noise.dark_rate);
      }
    }
  }
  return rec;
}

WitnessEstimate estimate_witness(const CountRecord& counts, const WitnessSpec& spec,
                                 bool dark_correction) {
  counts.validate();
  if (counts.n != spec.n()) {
    throw std::domain_error("count record N=" + std::to_string(counts.n) +
                            " does not match witness N=" + std::to_string(spec.n()));
  }
  WitnessEstimate out;
  double variance = 0.0;
  for (const Term& t : spec.terms()) {
    const auto n = counts.basis_counts(t.i, t.j);
    if (!(total_after_correction(n, counts.noise.dark_rate, dark_correction) > 0.0)) {
      throw EstimationError("no counts for preparation " + std::to_string(t.i) +
                            ", measurement " + std::to_string(t.j));
    }
    const RatioEstimate r = ratio(n, counts.noise.dark_rate, dark_correction);
    out.signed_value += t.sign * (2.0 * r.p - 1.0);
    variance += 4.0 * r.variance;
  }
  out.value = std::abs(out.signed_value);
  out.sigma = std::sqrt(variance);
  return out;
}

double expected_witness(const AngleEnsemble& e, const NoiseModel& noise) {
  e.validate();
  noise.validate();
  const WitnessSpec spec = make_witness(e.n);
  double sum = 0.0;
  for (const Term& t : spec.terms()) {
    const double p = basis_probabilities(e, t.i, t.j, noise.fidelity)[0];
    sum += t.sign * (2.0 * p - 1.0);
  }
  return std::abs(sum);
}

FidelityEstimate measure_fidelity(const AngleEnsemble& e, const NoiseModel& noise,
                                  std::uint64_t seed) {
  e.validate();
  noise.validate();
  FidelityEstimate out;
  double variance = 0.0;
  const double white = (1.0 - noise.fidelity) / e.d;
  for (int y = 1; y <= e.n - 1; ++y) {
    std::mt19937_64 rng(derive_seed(seed, 1'000'000ULL + static_cast<std::uint64_t>(y)));
    // The prepared state equals the projector state, so the ideal
    // distribution is concentrated on element 1.
    std::vector<std::int64_t> n(static_cast<std::size_t>(e.d));
    for (int k = 1; k <= e.d; ++k) {
      const double p = (k == 1 ? noise.fidelity : 0.0) + white;
      n[k - 1] = poisson(rng, noise.signal_rate * p + noise.dark_rate);
    }
    if (!(total_after_correction(n, noise.dark_rate, true) > 0.0)) {
      throw EstimationError("no counts for fidelity of measurement " + std::to_string(y));
    }
    const RatioEstimate r = ratio(n, noise.dark_rate, true);
    out.per_projector.push_back(r.p);
    out.mean += r.p;
    variance += r.variance;
  }
  const double m = static_cast<double>(out.per_projector.size());
  out.mean /= m;
  out.sigma = std::sqrt(variance) / m;
  return out;
}

}  // namespace dimwit
