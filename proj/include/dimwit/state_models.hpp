#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "dimwit/witness.hpp"

namespace dimwit {

// d-1 hyperspherical angles (radians) describing a real unit vector in
// dimension d. Stored as given; reduction modulo 2*pi happens inside the
// trigonometric evaluation only.
struct AngleVector {
  std::vector<double> phi;

  int dimension() const { return static_cast<int>(phi.size()) + 1; }
};

// Real amplitudes lambda_1..lambda_d of a normalized state.
struct RealStateVector {
  std::vector<double> amplitudes;

  // Throws std::domain_error unless sum of squares is 1 within tolerance.
  explicit RealStateVector(std::vector<double> a, double tolerance = 1e-10);

  int dimension() const { return static_cast<int>(amplitudes.size()); }
  double operator[](std::size_t i) const { return amplitudes[i]; }
};

// How preparations are turned into density matrices.
enum class Model {
  quantum,             // pure states |Psi_x><Psi_x|
  classical_diagonal,  // diag(lambda_i^2) in the computational basis
};

std::string_view to_string(Model m);
Model model_from_string(std::string_view s);

// N preparations and N-1 measurement directions in dimension d. The
// measurement for y projects onto the state built from measurements[y-1].
struct AngleEnsemble {
  Model model = Model::quantum;
  int n = 0;
  int d = 0;
  std::vector<AngleVector> preparations;
  std::vector<AngleVector> measurements;

  // Throws std::domain_error on count or dimension mismatch.
  void validate() const;

  // Flattened parameters: preparations 1..N then measurements 1..N-1,
  // each contributing d-1 consecutive angles.
  std::vector<double> flatten() const;
  static AngleEnsemble unflatten(Model model, int n, int d, std::span<const double> params);
};

// Number of flattened angles, (2N-1)(d-1).
std::size_t parameter_count(int n, int d);

RealStateVector angles_to_state(const AngleVector& a);

// Writes the d amplitudes for d-1 angles into out. No allocation; used on
// the optimizer hot path.
void angles_to_amplitudes(std::span<const double> phi, std::span<double> out);

CorrelatorTable quantum_correlators(const AngleEnsemble& e);
CorrelatorTable classical_correlators(const AngleEnsemble& e);
// Dispatches on e.model.
CorrelatorTable correlators(const AngleEnsemble& e);

// d-1 vectors completing m to an orthonormal basis. Gram-Schmidt over the
// canonical vectors e_1..e_d in order, skipping seeds whose residual norm
// falls below 1e-8.
std::vector<RealStateVector> complete_basis(const RealStateVector& m);

}  // namespace dimwit
