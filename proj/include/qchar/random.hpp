#pragma once

#include <cstdint>
#include <random>

#include "qchar/superalg.hpp"

namespace qchar {

// Seeded generator with platform-independent draws (no std distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform integer in [lo, hi].
  long uniform(long lo, long hi) {
    return lo + static_cast<long>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(unsigned percent) { return engine_() % 100 < percent; }

 private:
  std::mt19937_64 engine_;
};

// Random polynomial of the given parity (0, 1) with small integer coefficients;
// roughly `percent` of the admissible monomials are present.
GP random_polynomial(Rng& rng, std::size_t q, int parity, unsigned percent = 40, int max_degree = -1);
TensorField random_tensor(Rng& rng, std::size_t q, std::size_t lower, std::size_t upper,
                          int parity, unsigned percent = 15);
VectorField random_vector_field(Rng& rng, std::size_t q, int parity, unsigned percent = 30);

}  // namespace qchar
