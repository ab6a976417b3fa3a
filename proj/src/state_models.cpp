#include "dimwit/state_models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace dimwit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kParallelThreshold = 1e-8;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<std::vector<double>> amplitudes_of(const std::vector<AngleVector>& angles, int d) {
  std::vector<std::vector<double>> out;
  out.reserve(angles.size());
  for (const auto& a : angles) {
    std::vector<double> amp(static_cast<std::size_t>(d));
    angles_to_amplitudes(a.phi, amp);
    out.push_back(std::move(amp));
  }
  return out;
}

}  // namespace

RealStateVector::RealStateVector(std::vector<double> a, double tolerance)
    : amplitudes(std::move(a)) {
  if (amplitudes.empty()) throw std::domain_error("state vector must be non-empty");
  const double norm2 = dot(amplitudes, amplitudes);
  if (!(std::abs(norm2 - 1.0) <= tolerance)) {
    throw std::domain_error("state vector is not normalized (|v|^2 = " + std::to_string(norm2) +
                            ")");
  }
}

std::string_view to_string(Model m) {
  switch (m) {
    case Model::quantum:
      return "quantum";
    case Model::classical_diagonal:
      return "classical_diagonal";
  }
  return "unknown";
}

Model model_from_string(std::string_view s) {
  if (s == "quantum") return Model::quantum;
  if (s == "classical_diagonal" || s == "classical-diagonal") return Model::classical_diagonal;
  throw std::domain_error("unknown model '" + std::string(s) + "'");
}

std::size_t parameter_count(int n, int d) {
  return static_cast<std::size_t>(2 * n - 1) * static_cast<std::size_t>(d - 1);
}

void AngleEnsemble::validate() const {
  if (n < 3) throw std::domain_error("ensemble needs N >= 3");
  if (d < 2) throw std::domain_error("ensemble needs d >= 2");
  if (preparations.size() != static_cast<std::size_t>(n)) {
    throw std::domain_error("ensemble needs " + std::to_string(n) + " preparations, got " +
                            std::to_string(preparations.size()));
  }
  if (measurements.size() != static_cast<std::size_t>(n - 1)) {
    throw std::domain_error("ensemble needs " + std::to_string(n - 1) + " measurements, got " +
                            std::to_string(measurements.size()));
  }
  auto check = [this](const AngleVector& a) {
    if (a.dimension() != d) {
      throw std::domain_error("angle vector has " + std::to_string(a.phi.size()) +
                              " angles, expected " + std::to_string(d - 1));
    }
  };
  for (const auto& a : preparations) check(a);
  for (const auto& a : measurements) check(a);
}

std::vector<double> AngleEnsemble::flatten() const {
  validate();
  std::vector<double> out;
  out.reserve(parameter_count(n, d));
  for (const auto& a : preparations) out.insert(out.end(), a.phi.begin(), a.phi.end());
  for (const auto& a : measurements) out.insert(out.end(), a.phi.begin(), a.phi.end());
  return out;
}

AngleEnsemble AngleEnsemble::unflatten(Model model, int n, int d, std::span<const double> params) {
  if (n < 3 || d < 2) throw std::domain_error("unflatten needs N >= 3 and d >= 2");
  if (params.size() != parameter_count(n, d)) {
    throw std::domain_error("expected " + std::to_string(parameter_count(n, d)) +
                            " parameters, got " + std::to_string(params.size()));
  }
  AngleEnsemble e;
  e.model = model;
  e.n = n;
  e.d = d;
  const std::size_t w = static_cast<std::size_t>(d - 1);
  for (int k = 0; k < 2 * n - 1; ++k) {
    auto chunk = params.subspan(static_cast<std::size_t>(k) * w, w);
    AngleVector a{{chunk.begin(), chunk.end()}};
    (k < n ? e.preparations : e.measurements).push_back(std::move(a));
  }
  return e;
}

void angles_to_amplitudes(std::span<const double> phi, std::span<double> out) {
  // lambda_j = cos(phi_j) * prod_{k<j} sin(phi_k) for j < d, and
  // lambda_d = prod_{k<d} sin(phi_k). Empty products are 1.
  const std::size_t m = phi.size();
  double prefix = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double a = std::remainder(phi[j], kTwoPi);
    out[j] = std::cos(a) * prefix;
    prefix *= std::sin(a);
  }
  out[m] = prefix;
}

RealStateVector angles_to_state(const AngleVector& a) {
  if (a.dimension() < 2) throw std::domain_error("angle vector needs d >= 2 (at least one angle)");
  std::vector<double> amp(a.phi.size() + 1);
  angles_to_amplitudes(a.phi, amp);
  return RealStateVector(std::move(amp));
}

CorrelatorTable quantum_correlators(const AngleEnsemble& e) {
  e.validate();
  const auto prep = amplitudes_of(e.preparations, e.d);
  const auto meas = amplitudes_of(e.measurements, e.d);
  std::vector<double> p;
  p.reserve(prep.size() * meas.size());
  for (const auto& psi : prep) {
    for (const auto& mu : meas) {
      const double o = dot(psi, mu);
      p.push_back(std::min(1.0, o * o));
    }
  }
  return CorrelatorTable::from_probabilities(e.n, std::move(p));
}

CorrelatorTable classical_correlators(const AngleEnsemble& e) {
  e.validate();
  const auto prep = amplitudes_of(e.preparations, e.d);
  const auto meas = amplitudes_of(e.measurements, e.d);
  std::vector<double> p;
  p.reserve(prep.size() * meas.size());
  for (const auto& lam : prep) {
    for (const auto& mu : meas) {
      double s = 0.0;
      for (std::size_t i = 0; i < lam.size(); ++i) s += lam[i] * lam[i] * mu[i] * mu[i];
      p.push_back(std::min(1.0, s));
    }
  }
  return CorrelatorTable::from_probabilities(e.n, std::move(p));
}

CorrelatorTable correlators(const AngleEnsemble& e) {
  return e.model == Model::quantum ? quantum_correlators(e) : classical_correlators(e);
}

std::vector<RealStateVector> complete_basis(const RealStateVector& m) {
  const int d = m.dimension();
  if (d < 2) throw std::domain_error("basis completion needs d >= 2");
  std::vector<std::vector<double>> basis{m.amplitudes};
  for (int seed = 0; seed < d && static_cast<int>(basis.size()) < d; ++seed) {
    std::vector<double> v(static_cast<std::size_t>(d), 0.0);
    v[static_cast<std::size_t>(seed)] = 1.0;
    // Modified Gram-Schmidt, two passes for stability.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& b : basis) {
        const double c = dot(v, b);
        for (int i = 0; i < d; ++i) v[i] -= c * b[i];
      }
    }
    const double norm = std::sqrt(dot(v, v));
    if (norm < kParallelThreshold) continue;
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  std::vector<RealStateVector> out;
  for (std::size_t k = 1; k < basis.size(); ++k) out.emplace_back(std::move(basis[k]));
  return out;
}

}  // namespace dimwit
