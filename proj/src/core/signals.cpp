#include "signals.hpp"

#include <algorithm>
#include <cmath>

namespace sparselab {
namespace signals {

namespace {

// First k indices of a seeded Fisher-Yates shuffle of `pool`.
IndexSet draw_subset(IndexSet pool, std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.next_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

IndexSet all_indices(std::size_t n) {
  IndexSet v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

ModelSignal generate_model_signal(std::size_t n, std::size_t k_strong, double a1,
                                  double delta, std::size_t k_total,
                                  std::uint64_t seed) {
  require(k_strong <= k_total && k_total <= n, Errc::invalid_argument,
          "generate_model_signal: need k_strong <= k_total <= n");
  require(a1 > 0.0, Errc::invalid_argument, "generate_model_signal: a1 must be positive");
  require(delta >= 0.0, Errc::invalid_argument,
          "generate_model_signal: delta must be nonnegative");
  const std::size_t k_tail = k_total - k_strong;
  require(k_tail == 0 || delta > 0.0, Errc::invalid_argument,
          "generate_model_signal: tail entries need positive delta");

  Rng rng(Rng::derive(seed, 0x7369676e616cULL));
  ModelSignal s;
  s.x.assign(n, 0.0);
  s.amplitude_floor = a1;
  s.k_total = k_total;
  s.seed = seed;

  s.strong_set = draw_subset(all_indices(n), k_strong, rng);
  for (std::size_t i : s.strong_set)
    s.x[i] = rng.next_sign() * (a1 * (1.0 + rng.next_double()));

  s.tail_mass = (k_tail > 0) ? delta : 0.0;
  if (k_tail > 0) {
    IndexSet off_k = complement(s.strong_set, n);
    IndexSet tail = draw_subset(std::move(off_k), k_tail, rng);
    const double mass = delta / static_cast<double>(k_tail);
    for (std::size_t i : tail) s.x[i] = rng.next_sign() * mass;
  }

  s.support = support(s.x);
  // generator self-check: the three model invariants must hold exactly
  require(s.support.size() == k_total, Errc::internal, "model signal: support count");
  for (std::size_t i : s.strong_set)
    require(std::fabs(s.x[i]) >= a1, Errc::internal, "model signal: amplitude floor");
  double tail_l1 = restricted_l1(s.x, complement(s.strong_set, n));
  require(std::fabs(tail_l1 - s.tail_mass) <= 1e-12 * (1.0 + s.tail_mass),
          Errc::internal, "model signal: tail mass");
  return s;
}

NonuniformSignal generate_nonuniform_signal(std::size_t n, double gamma1, double p1,
                                            double p2, AmpLaw amp_law,
                                            std::uint64_t seed) {
  require(gamma1 >= 0.0 && gamma1 <= 1.0, Errc::invalid_argument,
          "generate_nonuniform_signal: gamma1 must be in [0,1]");
  require(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0, Errc::invalid_argument,
          "generate_nonuniform_signal: probabilities must be in [0,1]");

  Rng rng(Rng::derive(seed, 0x6e6f6e756e69ULL));
  const std::size_t n1 = static_cast<std::size_t>(std::floor(gamma1 * static_cast<double>(n)));

  NonuniformSignal s;
  s.p1 = p1;
  s.p2 = p2;
  s.seed = seed;
  s.x.assign(n, 0.0);

  IndexSet perm = all_indices(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(perm[i], perm[j]);
  }
  s.class1.assign(perm.begin(), perm.begin() + n1);
  s.class2.assign(perm.begin() + n1, perm.end());
  std::sort(s.class1.begin(), s.class1.end());
  std::sort(s.class2.begin(), s.class2.end());

  auto fill = [&](const IndexSet& cls, double p) {
    for (std::size_t i : cls) {
      if (rng.next_double() >= p) continue;
      s.x[i] = (amp_law == AmpLaw::gaussian) ? rng.next_gaussian() : rng.next_sign();
      if (s.x[i] == 0.0) s.x[i] = 1.0;  // gaussian draw of exactly 0 counts as nonzero
    }
  };
  fill(s.class1, p1);
  fill(s.class2, p2);
  return s;
}

double expected_nonzeros(std::size_t n, double gamma1, double p1, double p2) {
  require(gamma1 >= 0.0 && gamma1 <= 1.0 && p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 &&
              p2 <= 1.0,
          Errc::invalid_argument, "expected_nonzeros: invalid fractions");
  return static_cast<double>(n) * (gamma1 * p1 + (1.0 - gamma1) * p2);
}

}  // namespace signals
}  // namespace sparselab
