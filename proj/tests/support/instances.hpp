#pragma once

// Seeded AnchoredAffine test instances with an analytically known solution.
//
// A is an axis-aligned box; B is A translated along one axis by its width plus a gap g,
// so the facing faces are parallel and dist(A,B) = g. The anchors sit on the facing
// faces (b* = a* + g e_k), and the isometries reflect the separating axis, optionally
// composed with reflections of transverse axes about the face center. All box corners
// and the anchors sit on a 0.1 lattice, with widths in {0.6, 0.8, 1.0}, so grid oracles
// at resolution 0.02 contain the anchors.

#include <cstdint>
#include <vector>

#include "proxipair/geometry.hpp"
#include "proxipair/mappings.hpp"
#include "proxipair/random.hpp"

namespace proxipair::fixtures {

struct AnchoredInstance {
  ConvexSet a;
  ConvexSet b;
  CyclicMap map;
  Vector a_star;
  Vector b_star;
  double lambda;
  double d;
  std::size_t dim;
};

inline double lattice(Rng& rng, int lo_tenths, int hi_tenths) {
  const int k = lo_tenths + static_cast<int>(rng.uniform() * (hi_tenths - lo_tenths + 1));
  return 0.1 * static_cast<double>(std::min(k, hi_tenths));
}

inline AnchoredInstance make_anchored_instance(std::uint64_t seed, std::size_t dim, double lambda) {
  Rng rng(derive_seed(seed, 100));
  const std::size_t axis = static_cast<std::size_t>(rng.uniform() * static_cast<double>(dim)) % dim;
  const double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
  const double g = lattice(rng, 5, 20);
  Vector lo(dim), hi(dim);
  const double widths[] = {0.6, 0.8, 1.0};
  for (std::size_t i = 0; i < dim; ++i) {
    lo[i] = lattice(rng, -10, 10);
    hi[i] = lo[i] + widths[static_cast<std::size_t>(rng.uniform() * 3.0) % 3];
  }
  Vector shift(dim);
  shift[axis] = sign * (hi[axis] - lo[axis] + g);
  ConvexSet a = ConvexSet::box(lo, hi);
  ConvexSet b = ConvexSet::box(lo + shift, hi + shift);

  // transverse flips need the anchor at the face center
  const bool centered = rng.uniform() < 0.5;
  Vector a_star(dim);
  Vector flips(dim, 1.0);
  for (std::size_t i = 0; i < dim; ++i) {
    if (i == axis) {
      a_star[i] = sign > 0 ? hi[i] : lo[i];
      flips[i] = -1.0;
    } else if (centered) {
      a_star[i] = 0.5 * (lo[i] + hi[i]);
      flips[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    } else {
      const int span = static_cast<int>(std::lround((hi[i] - lo[i]) * 10.0));
      a_star[i] = lo[i] + 0.1 * static_cast<double>(static_cast<int>(rng.uniform() * (span + 1)) % (span + 1));
    }
  }
  Vector step(dim);
  step[axis] = sign * g;
  Vector b_star = a_star + step;
  const Matrix q = Matrix::diagonal(flips);
  CyclicMap map = make_anchored_affine(a_star, b_star, lambda, q, q, a, b);
  return {a, b, map, a_star, b_star, lambda, g, dim};
}

/// The 20-instance family: lambda in {0.3, 0.5, 0.7, 0.9}, dimensions 2 and 3.
inline std::vector<AnchoredInstance> acceptance_instances() {
  const double lambdas[] = {0.3, 0.5, 0.7, 0.9};
  std::vector<AnchoredInstance> out;
  for (std::uint64_t i = 0; i < 20; ++i)
    out.push_back(make_anchored_instance(1000 + i, 2 + i % 2, lambdas[(i / 2) % 4]));
  return out;
}

}  // namespace proxipair::fixtures
