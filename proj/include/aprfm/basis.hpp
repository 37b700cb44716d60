#pragma once

// Partition-of-unity random-feature bases. A FeatureModel represents
//   u(y) = sum_i psi_i(y) sum_j c_ij sigma(w_ij . y~_i + b_ij),
// where y~_i is y mapped affinely onto [-1, 1]^d by box i and psi_i is the
// normalized tensor-product PoU. Column layout is box-major, feature-minor.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace aprfm::basis {

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const noexcept { return lo.size(); }
  double center(std::size_t j) const noexcept { return 0.5 * (hi[j] + lo[j]); }
  double radius(std::size_t j) const noexcept { return 0.5 * (hi[j] - lo[j]); }
};

/// Validates lo < hi componentwise.
Box make_box(std::vector<double> lo, std::vector<double> hi);

/// Uniform tensor partition of an enclosing hypercube. Boxes are ordered
/// lexicographically with the last axis varying fastest.
class BoxPartition {
 public:
  static BoxPartition uniform(std::vector<double> lo, std::vector<double> hi, std::vector<int> counts);

  const std::vector<Box>& boxes() const noexcept { return boxes_; }
  const std::vector<int>& counts() const noexcept { return counts_; }
  const Box& enclosing() const noexcept { return enclosing_; }
  std::size_t size() const noexcept { return boxes_.size(); }
  std::size_t dim() const noexcept { return enclosing_.dim(); }

 private:
  Box enclosing_;
  std::vector<int> counts_;
  std::vector<Box> boxes_;
};

enum class Activation { tanh, sine_pi };
enum class PouKind { phi_a, phi_b };

double activate(Activation act, double t) noexcept;
double activate_derivative(Activation act, double t) noexcept;

/// Fixed inner weights, uniform in [-range, range]. Each (box, feature) pair
/// draws from its own generator keyed by (seed, box, feature), so the
/// values do not depend on the order in which features are built.
class FeatureWeights {
 public:
  static FeatureWeights generate(std::uint64_t seed, std::size_t boxes, std::size_t per_box,
                                 std::size_t dim, double range);

  std::span<const double> w(std::size_t box, std::size_t feature) const noexcept {
    return {w_.data() + (box * per_box_ + feature) * dim_, dim_};
  }
  double b(std::size_t box, std::size_t feature) const noexcept { return b_[box * per_box_ + feature]; }

  std::size_t boxes() const noexcept { return boxes_; }
  std::size_t per_box() const noexcept { return per_box_; }
  std::size_t dim() const noexcept { return dim_; }
  double range() const noexcept { return range_; }
  std::uint64_t seed() const noexcept { return seed_; }

  const std::vector<double>& raw_w() const noexcept { return w_; }
  const std::vector<double>& raw_b() const noexcept { return b_; }

 private:
  std::size_t boxes_ = 0;
  std::size_t per_box_ = 0;
  std::size_t dim_ = 0;
  double range_ = 1.0;
  std::uint64_t seed_ = 0;
  std::vector<double> w_;
  std::vector<double> b_;
};

class FeatureModel {
 public:
  FeatureModel(BoxPartition partition, FeatureWeights weights, Activation activation, PouKind pou);

  const BoxPartition& partition() const noexcept { return partition_; }
  const FeatureWeights& weights() const noexcept { return weights_; }
  Activation activation() const noexcept { return activation_; }
  PouKind pou_kind() const noexcept { return pou_; }

  std::size_t dim() const noexcept { return partition_.dim(); }
  std::size_t num_boxes() const noexcept { return partition_.size(); }
  std::size_t features_per_box() const noexcept { return weights_.per_box(); }
  std::size_t num_columns() const noexcept { return num_boxes() * features_per_box(); }

  /// Evaluates every basis function psi_i * phi_ij at y and its derivative
  /// along `direction`. Both outputs have num_columns() entries.
  /// Throws degenerate-cover if no PoU function is supported at y.
  void evaluate(std::span<const double> y, std::span<const double> direction,
                std::span<double> value, std::span<double> directional) const;

 private:
  BoxPartition partition_;
  FeatureWeights weights_;
  Activation activation_;
  PouKind pou_;
};

std::vector<double> normalize_to_box(std::span<const double> y, const Box& box);

double pou_univariate(PouKind kind, double z) noexcept;
/// Right-limit convention at |z| = 3/4 and 5/4 (both limits are zero there anyway).
double pou_univariate_derivative(PouKind kind, double z) noexcept;

/// psi~_i(y) = psi_i(y) / sum_k psi_k(y).
std::vector<double> pou_tensor_normalized(const BoxPartition& partition, PouKind kind,
                                          std::span<const double> y);

struct FeatureValue {
  double value = 0.0;
  std::vector<double> grad;
};

/// The bare random feature phi_ij (no PoU factor) and its gradient in y.
FeatureValue feature_eval(const FeatureModel& model, std::size_t box, std::size_t feature,
                          std::span<const double> y);

double model_eval(const FeatureModel& model, std::span<const double> coeffs, std::span<const double> y);

}  // namespace aprfm::basis
