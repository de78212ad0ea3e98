#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/linalg.hpp"

namespace fraclab {

// Letters index into the map list of a system; composition order is
// S_{i_1} o S_{i_2} o ... o S_{i_k} (leftmost letter applied last).
using Word = std::vector<std::uint8_t>;

std::string word_to_string(const Word& w);

// Contracting similarity x -> scale * rot * x + trans.  Scale 1 is permitted
// only for the identity element returned by composing the empty word; systems
// require strict contractions.
struct Similarity {
  double scale = 1.0;
  Mat rot;
  Vec trans;

  std::size_t dim() const { return trans.size(); }
  Vec apply(const Vec& x) const { return scale * rot.apply(x) + trans; }
  static Similarity identity(std::size_t d) {
    return Similarity{1.0, Mat::identity(d), Vec(d, 0.0)};
  }
  // Fixed point of a strict contraction: solves (I - scale*rot) x = trans.
  Vec fixed_point() const;
};

// a o b as maps: (a o b)(x) = a(b(x)).
Similarity compose(const Similarity& a, const Similarity& b);

struct CondensationSet {
  enum class Kind { point, segment, polyline, point_cloud };
  Kind kind = Kind::point;
  std::vector<Vec> pts;  // point: 1; segment: 2 endpoints; polyline/cloud: >= 1

  static CondensationSet point(Vec p);
  static CondensationSet segment(Vec a, Vec b);
  static CondensationSet polyline(std::vector<Vec> pts);
  static CondensationSet point_cloud(std::vector<Vec> pts);

  // Sample points at most `spacing` apart along segments/polylines.
  std::vector<Vec> discretize(double spacing) const;
  double diameter() const;
};

// Iterated function system with optional condensation set.
// Invariants: at least one map, all dimensions agree, every scale lies in
// (0,1), every rotation block is orthogonal to within 1e-12.
class IfsSystem {
 public:
  IfsSystem(std::vector<Similarity> maps, std::optional<CondensationSet> condensation,
            std::string name = "");

  const std::vector<Similarity>& maps() const { return maps_; }
  const std::optional<CondensationSet>& condensation() const { return condensation_; }
  std::size_t dim() const { return dim_; }
  const std::string& name() const { return name_; }
  double max_scale() const { return max_scale_; }

  // Ball B(center, radius) with S_i(B) in B for all i and condensation in B;
  // contains the attractor and the orbital set.
  const Vec& bound_center() const { return bound_center_; }
  double bound_radius() const { return bound_radius_; }

 private:
  std::vector<Similarity> maps_;
  std::optional<CondensationSet> condensation_;
  std::size_t dim_;
  std::string name_;
  double max_scale_;
  Vec bound_center_;
  double bound_radius_;
};

Similarity compose(const IfsSystem& sys, const Word& w);

// Flat point store; coordinates packed row-major.
class PointCloud {
 public:
  explicit PointCloud(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return data_.size() / dim_; }
  const double* pt(std::size_t i) const { return data_.data() + i * dim_; }
  Vec point(std::size_t i) const {
    return Vec(pt(i), pt(i) + dim_);
  }
  void push(const double* p) { data_.insert(data_.end(), p, p + dim_); }
  void push(const Vec& p) { push(p.data()); }
  const std::vector<double>& data() const { return data_; }

  double delta = 0.0;        // resolution the cloud was generated for
  bool truncated = false;    // budget was hit; contents are a prefix
  std::string source;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

struct EnumBudget {
  std::uint64_t max_words = 200'000'000;      // expanded words across all levels
  std::uint64_t max_frontier = 1u << 22;      // per-level deduplicated frontier
  std::uint64_t max_cloud_points = 1u << 24;  // materialised cloud points
  bool allow_partial = false;                 // flag instead of ResourceError
};

// Words I with c_I <= r < c_{I-dagger}; prefix-free and complete.
std::vector<Word> stopping_set(const IfsSystem& sys, double r,
                               const EnumBudget& budget = {});

// Words I with 2^{-k-1} < c_I <= 2^{-k}.  Not prefix-free in general.
std::vector<Word> level_set(const IfsSystem& sys, int k, const EnumBudget& budget = {});

// delta/2-net of the truncated orbital set together with an attractor net:
// images S_I(C) over all words with c_I * (diam C + 2R) >= delta/2, each
// discretised at delta/4, plus the same enumeration seeded at the map fixed
// points to cover the attractor.  DomainError without condensation.
PointCloud orbital_cloud(const IfsSystem& sys, double delta,
                         const EnumBudget& budget = {});

// Union of S_I(C) over the level-k words, discretised at delta/4.
PointCloud level_slice(const IfsSystem& sys, int k, double delta,
                       const EnumBudget& budget = {});

// Diagonal affine map x_j -> scale[j] * x_j + trans[j]; used for the
// two-scale companion system alongside similarity machinery.
struct DiagAffineMap {
  Vec scale;
  Vec trans;
};

class DiagAffineSystem {
 public:
  DiagAffineSystem(std::vector<DiagAffineMap> maps, std::string name = "");
  const std::vector<DiagAffineMap>& maps() const { return maps_; }
  std::size_t dim() const { return maps_[0].scale.size(); }
  const std::string& name() const { return name_; }
  const Vec& bound_center() const { return bound_center_; }
  double bound_radius() const { return bound_radius_; }

 private:
  std::vector<DiagAffineMap> maps_;
  std::string name_;
  Vec bound_center_;
  double bound_radius_;
};

// delta/2-net of the attractor of a diagonal affine system.
PointCloud attractor_cloud(const DiagAffineSystem& sys, double delta,
                           const EnumBudget& budget = {});

// ---- Presets ----------------------------------------------------------------

// Two maps lambda*x and lambda*x + (1-lambda, 0) on the plane with the
// vertical unit segment {0} x [0,1] as condensation.
IfsSystem bernoulli_comb(double lambda);

// Three maps: the comb pair plus eps*x + (0, 1-eps); requires 0<eps<1-lambda.
IfsSystem extended_comb(double lambda, double eps);

// (x,y) -> (lambda x, y/2) and (lambda x + 1 - lambda, y/2 + 1/2).
DiagAffineSystem affine_companion(double lambda);

// Maps c * g_i with zero translation for rotations g_i, condensation {x0}.
IfsSystem sphere_system(double c, const std::vector<Mat>& rotations, const Vec& x0);

// Rotations by angle arccos(3/5) about the first and last coordinate axes,
// plus inverses; entries in {0, +-3/5, +-4/5, 1}.  These generate a free
// group.
std::vector<Mat> default_rotations();

// Default sphere system: default rotations, x0 = (1, 0, ..., 0), dimension 3.
IfsSystem sphere_system(double c);

// Builds a system from the JSON configuration schema (see README).
// Exactly one of "preset" or "maps" must be given.
IfsSystem system_from_json_text(const std::string& json_text);

}  // namespace fraclab
