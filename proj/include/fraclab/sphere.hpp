#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraclab/boxcount.hpp"
#include "fraclab/ifs.hpp"

namespace fraclab {

// Finite set of proper rotations acting on the unit sphere.
struct RotationSet {
  std::vector<Mat> generators;  // orthogonal, det 1, each within 1e-12
  bool include_inverses = true;

  // Generators plus transposes (when requested), with duplicates removed.
  std::vector<Mat> alphabet() const;
};

RotationSet make_rotation_set(std::vector<Mat> generators, bool include_inverses);

// The two rational rotations by angle arccos(3/5) about orthogonal axes.
RotationSet default_rotation_set();

// Control pair: rotations about one common axis (angles arccos(3/5) and its
// double), so every orbit stays on a circle.
RotationSet commuting_rotation_set();

// Images of x under all length-n words in the alphabet, deduplicated on the
// 2^-20 mesh.  Requires a unit vector; word budget caps the expansion.
PointCloud orbit(const RotationSet& rot, const Vec& x, int n,
                 std::uint64_t max_words = 50'000'000);

struct OrbitCounts {
  std::vector<int> n;                 // 0..n_max
  std::vector<std::uint64_t> counts;  // mesh cells covered by the length-n set
  int m = 0;
  int saturation_onset = 0;  // first n filling >= 1/4 of mesh capacity, else n_max
  bool saturated = false;
  double eps_hat = 0.0;  // fitted per-step growth factor minus 1
};

// Single expansion to depth n_max with per-level cell counts at mesh 2^-m.
// The growth factor is fitted on the window of up to five levels ending at
// the saturation onset.
OrbitCounts orbit_counts(const RotationSet& rot, const Vec& x, int n_max, int m,
                         std::uint64_t max_words = 50'000'000);

// Header n,count,log2count.
std::string orbit_csv(const OrbitCounts& counts);

struct SgResult {
  PointCloud cloud{0};
  CountCurve curve;
  DimensionEstimate estimate;
  double eps_hat = 0.0;
  double alpha_c = 0.0;    // similarity dimension of the two-map model system
  double target_dim = 0.0; // (1 - alpha_c) * (d - 1)
  int depth = 0;           // exact expansion depth
  int shells = 0;          // scaled orbit shells materialised
};

// Point cloud of the set {0} union of c^n-scaled length-n orbits, counted at
// meshes 2^-3 .. 2^-m, with a dimension estimate over that window.  Shells
// beyond the exact expansion depth reuse the deepest parity-matched orbit,
// which is a subset of the true one, so counts err low.
SgResult sg_attractor(double c, const RotationSet& rot, const Vec& x, int m,
                      const EnumBudget& budget = {});

}  // namespace fraclab
