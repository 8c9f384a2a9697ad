#ifndef SPARSELAB_SIGNALS_HPP
#define SPARSELAB_SIGNALS_HPP

#include <cstdint>

#include "numcore.hpp"

namespace sparselab {
namespace signals {

// Two-part signal: a strong set K of entries with magnitude >= a1 and a tail
// of total l1 mass delta spread over k_total - k_strong extra positions.
struct ModelSignal {
  Vector x;
  IndexSet strong_set;     // K
  double amplitude_floor;  // a1
  double tail_mass;        // delta, l1 mass off K
  IndexSet support;        // K_total
  std::size_t k_total;
  std::uint64_t seed;
};

// Two-class nonuniform signal: per-entry nonzero probabilities p1 on class1,
// p2 on class2.
struct NonuniformSignal {
  Vector x;
  IndexSet class1;
  IndexSet class2;
  double p1, p2;
  std::uint64_t seed;
};

enum class AmpLaw { gaussian, flat };

// Strong magnitudes uniform in [a1, 2*a1] with random signs; tail entries
// each carry l1 mass delta / (k_total - k_strong) with random signs.
ModelSignal generate_model_signal(std::size_t n, std::size_t k_strong, double a1,
                                  double delta, std::size_t k_total,
                                  std::uint64_t seed);

NonuniformSignal generate_nonuniform_signal(std::size_t n, double gamma1, double p1,
                                            double p2, AmpLaw amp_law,
                                            std::uint64_t seed);

// n * (gamma1*p1 + (1-gamma1)*p2)
double expected_nonzeros(std::size_t n, double gamma1, double p1, double p2);

}  // namespace signals
}  // namespace sparselab

#endif
