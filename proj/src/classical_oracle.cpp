#include "dimwit/classical_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace dimwit {

namespace {

struct Scan {
  long value = -1;
  std::vector<int> emission;  // 0-based symbols
  std::uint64_t scanned = 0;
};

// Value of the best responses for a fixed emission: sum over (y, m) of
// |sum of signs of the terms whose preparation emits m|.
long emission_value(const std::vector<int>& em, std::span<const int> signs, int n, int d,
                    std::vector<long>& column) {
  const int cols = n - 1;
  std::fill(column.begin(), column.end(), 0);
  for (int x = 0; x < n; ++x) {
    const int m = em[x];
    for (int y = 0; y < cols; ++y) column[y * d + m] += signs[x * cols + y];
  }
  long total = 0;
  for (long c : column) total += c < 0 ? -c : c;
  return total;
}

// Decodes a lexicographic index into base-d digits, x = 1 most significant.
std::vector<int> decode(std::uint64_t index, int n, int d) {
  std::vector<int> em(static_cast<std::size_t>(n));
  for (int x = n - 1; x >= 0; --x) {
    em[x] = static_cast<int>(index % d);
    index /= d;
  }
  return em;
}

Scan scan_range(std::uint64_t begin, std::uint64_t end, int n, int d, std::span<const int> signs,
                bool canonical_only) {
  Scan best;
  std::vector<long> column(static_cast<std::size_t>(n - 1) * d);
  std::vector<int> em = decode(begin, n, d);
  for (std::uint64_t idx = begin; idx < end; ++idx) {
    bool take = true;
    if (canonical_only) {
      int next_new = 0;
      for (int x = 0; x < n && take; ++x) {
        if (em[x] > next_new) take = false;
        else if (em[x] == next_new) ++next_new;
      }
    }
    if (take) {
      ++best.scanned;
      const long v = emission_value(em, signs, n, d, column);
      if (v > best.value) {
        best.value = v;
        best.emission = em;
      }
    }
    for (int x = n - 1; x >= 0; --x) {
      if (++em[x] < d) break;
      em[x] = 0;
    }
  }
  return best;
}

}  // namespace

void DeterministicStrategy::validate() const {
  if (n < 3 || d < 1) throw std::domain_error("strategy needs N >= 3 and d >= 1");
  if (emission.size() != static_cast<std::size_t>(n)) {
    throw std::domain_error("strategy emission map must cover every preparation");
  }
  if (response.size() != static_cast<std::size_t>(n - 1) * d) {
    throw std::domain_error("strategy response map must cover every (y, symbol)");
  }
  for (int m : emission) {
    if (m < 1 || m > d) throw std::domain_error("emission symbol out of range");
  }
  for (int r : response) {
    if (r != 1 && r != -1) throw std::domain_error("response outcome must be +1 or -1");
  }
}

ClassicalMaximum exact_classical_max(int n, int d, const OracleOptions& options) {
  const WitnessSpec spec(n);
  if (d < 1) throw std::domain_error("classical oracle needs d >= 1");
  double total = 1.0;
  for (int x = 0; x < n; ++x) total *= d;
  if (total > static_cast<double>(kEnumerationGuard)) {
    throw ResourceError("d^N = " + std::to_string(static_cast<long long>(total)) +
                        " exceeds the enumeration guard of " + std::to_string(kEnumerationGuard) +
                        "; use the closed-form classical bound instead");
  }
  const auto count = static_cast<std::uint64_t>(total);
  const auto signs = spec.sign_matrix();

  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, 64));
  std::vector<Scan> parts(workers);
  auto run = [&](unsigned w) {
    const std::uint64_t begin = count * w / workers;
    const std::uint64_t end = count * (w + 1) / workers;
    parts[w] = scan_range(begin, end, n, d, signs, options.symmetry_reduction);
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }

  // Ranges are in lexicographic order, so the first strict maximum wins.
  Scan best;
  for (auto& p : parts) {
    best.scanned += p.scanned;
    if (p.value > best.value) {
      best.value = p.value;
      best.emission = std::move(p.emission);
    }
  }

  ClassicalMaximum out;
  out.value = static_cast<double>(best.value);
  out.emissions_scanned = best.scanned;
  DeterministicStrategy& s = out.strategy;
  s.n = n;
  s.d = d;
  for (int m : best.emission) s.emission.push_back(m + 1);
  s.response.assign(static_cast<std::size_t>(n - 1) * d, 1);
  for (int y = 1; y <= n - 1; ++y) {
    for (int m = 1; m <= d; ++m) {
      int column = 0;
      for (int x = 1; x <= n; ++x) {
        if (s.emission[x - 1] == m && spec.contains(x, y)) column += spec.sign(x, y);
      }
      s.response[static_cast<std::size_t>(y - 1) * d + (m - 1)] = column < 0 ? -1 : 1;
    }
  }
  return out;
}

CorrelatorTable strategy_correlators(const DeterministicStrategy& s) {
  s.validate();
  std::vector<double> e;
  e.reserve(static_cast<std::size_t>(s.n) * (s.n - 1));
  for (int x = 1; x <= s.n; ++x) {
    for (int y = 1; y <= s.n - 1; ++y) e.push_back(s.respond(y, s.emission[x - 1]));
  }
  return CorrelatorTable(s.n, std::move(e));
}

}  // namespace dimwit
