#include "aprfm/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "aprfm/error.hpp"

namespace aprfm::basis {

namespace {

constexpr std::size_t kMaxDim = 3;

// Maps a 64-bit draw onto [0, 1) with 53 bits of resolution.
double unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

Box make_box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.empty() || lo.size() != hi.size()) {
    fail(ErrorKind::invalid_argument, "box bounds must be non-empty and of equal dimension");
  }
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (!(lo[j] < hi[j])) {
      fail(ErrorKind::invalid_argument, "box requires lo < hi on axis " + std::to_string(j));
    }
  }
  return Box{std::move(lo), std::move(hi)};
}

BoxPartition BoxPartition::uniform(std::vector<double> lo, std::vector<double> hi, std::vector<int> counts) {
  BoxPartition p;
  p.enclosing_ = make_box(std::move(lo), std::move(hi));
  const std::size_t d = p.enclosing_.dim();
  if (d > kMaxDim) fail(ErrorKind::invalid_argument, "partition dimension above 3 is not supported");
  if (counts.size() != d) fail(ErrorKind::invalid_argument, "partition counts do not match dimension");
  std::size_t total = 1;
  for (int c : counts) {
    if (c < 1) fail(ErrorKind::invalid_argument, "partition counts must be positive");
    total *= static_cast<std::size_t>(c);
  }
  p.counts_ = std::move(counts);
  p.boxes_.reserve(total);

  std::vector<int> idx(d, 0);
  for (std::size_t n = 0; n < total; ++n) {
    // Decode n with the last axis fastest.
    std::size_t rem = n;
    for (std::size_t a = d; a-- > 0;) {
      idx[a] = static_cast<int>(rem % static_cast<std::size_t>(p.counts_[a]));
      rem /= static_cast<std::size_t>(p.counts_[a]);
    }
    Box box;
    box.lo.resize(d);
    box.hi.resize(d);
    for (std::size_t a = 0; a < d; ++a) {
      const double width = p.enclosing_.hi[a] - p.enclosing_.lo[a];
      const double step = width / p.counts_[a];
      box.lo[a] = p.enclosing_.lo[a] + step * idx[a];
      // Last box snaps to the enclosing face so the tiling is exact.
      box.hi[a] = idx[a] + 1 == p.counts_[a] ? p.enclosing_.hi[a] : p.enclosing_.lo[a] + step * (idx[a] + 1);
    }
    p.boxes_.push_back(std::move(box));
  }
  return p;
}

double activate(Activation act, double t) noexcept {
  switch (act) {
    case Activation::tanh: return std::tanh(t);
    case Activation::sine_pi: return std::sin(std::numbers::pi * t);
  }
  return 0.0;
}

double activate_derivative(Activation act, double t) noexcept {
  switch (act) {
    case Activation::tanh: {
      const double th = std::tanh(t);
      return 1.0 - th * th;
    }
    case Activation::sine_pi: return std::numbers::pi * std::cos(std::numbers::pi * t);
  }
  return 0.0;
}

FeatureWeights FeatureWeights::generate(std::uint64_t seed, std::size_t boxes, std::size_t per_box,
                                        std::size_t dim, double range) {
  if (boxes == 0 || per_box == 0 || dim == 0) {
    fail(ErrorKind::invalid_argument, "feature weights need positive box, feature and dimension counts");
  }
  if (!(range > 0.0) || !std::isfinite(range)) {
    fail(ErrorKind::invalid_argument, "weight range B must be positive and finite");
  }
  FeatureWeights fw;
  fw.boxes_ = boxes;
  fw.per_box_ = per_box;
  fw.dim_ = dim;
  fw.range_ = range;
  fw.seed_ = seed;
  fw.w_.resize(boxes * per_box * dim);
  fw.b_.resize(boxes * per_box);
  for (std::size_t i = 0; i < boxes; ++i) {
    for (std::size_t j = 0; j < per_box; ++j) {
      std::seed_seq key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                        static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
      std::mt19937_64 gen(key);
      const std::size_t col = i * per_box + j;
      for (std::size_t k = 0; k < dim; ++k) {
        fw.w_[col * dim + k] = range * (2.0 * unit_interval(gen()) - 1.0);
      }
      fw.b_[col] = range * (2.0 * unit_interval(gen()) - 1.0);
    }
  }
  return fw;
}

FeatureModel::FeatureModel(BoxPartition partition, FeatureWeights weights, Activation activation, PouKind pou)
    : partition_(std::move(partition)), weights_(std::move(weights)), activation_(activation), pou_(pou) {
  if (weights_.boxes() != partition_.size() || weights_.dim() != partition_.dim()) {
    fail(ErrorKind::invalid_argument, "feature weights shape does not match the partition");
  }
}

void FeatureModel::evaluate(std::span<const double> y, std::span<const double> direction,
                            std::span<double> value, std::span<double> directional) const {
  const std::size_t d = dim();
  const std::size_t boxes = num_boxes();
  const std::size_t per_box = features_per_box();
  if (y.size() != d || direction.size() != d) {
    fail(ErrorKind::invalid_argument, "evaluation point dimension mismatch");
  }
  if (value.size() != num_columns() || directional.size() != num_columns()) {
    fail(ErrorKind::invalid_argument, "output span size mismatch");
  }

  thread_local std::vector<double> psi, dpsi, zs;
  psi.resize(boxes);
  dpsi.resize(boxes);
  zs.resize(boxes * d);

  double sum = 0.0;
  double dsum = 0.0;
  for (std::size_t i = 0; i < boxes; ++i) {
    const Box& box = partition_.boxes()[i];
    std::array<double, kMaxDim> phi{};
    std::array<double, kMaxDim> dphi{};
    for (std::size_t k = 0; k < d; ++k) {
      const double r = box.radius(k);
      const double z = (y[k] - box.center(k)) / r;
      zs[i * d + k] = z;
      phi[k] = pou_univariate(pou_, z);
      dphi[k] = pou_univariate_derivative(pou_, z) / r;
    }
    double p = 1.0;
    for (std::size_t k = 0; k < d; ++k) p *= phi[k];
    double dp = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      if (direction[k] == 0.0 || dphi[k] == 0.0) continue;
      double term = direction[k] * dphi[k];
      for (std::size_t l = 0; l < d; ++l) {
        if (l != k) term *= phi[l];
      }
      dp += term;
    }
    psi[i] = p;
    dpsi[i] = dp;
    sum += p;
    dsum += dp;
  }
  if (!(sum > 0.0)) {
    fail(ErrorKind::degenerate_cover, "no partition-of-unity function is supported at the evaluation point");
  }

  for (std::size_t i = 0; i < boxes; ++i) {
    const double pt = psi[i] / sum;
    const double dpt = (dpsi[i] - pt * dsum) / sum;
    double* val = value.data() + i * per_box;
    double* dd = directional.data() + i * per_box;
    if (pt == 0.0 && dpt == 0.0) {
      std::fill(val, val + per_box, 0.0);
      std::fill(dd, dd + per_box, 0.0);
      continue;
    }
    const Box& box = partition_.boxes()[i];
    std::array<double, kMaxDim> scaled_dir{};
    for (std::size_t k = 0; k < d; ++k) scaled_dir[k] = direction[k] / box.radius(k);
    const double* z = zs.data() + i * d;
    for (std::size_t j = 0; j < per_box; ++j) {
      const auto w = weights_.w(i, j);
      double t = weights_.b(i, j);
      double wdir = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        t += w[k] * z[k];
        wdir += w[k] * scaled_dir[k];
      }
      double s;
      double ds;
      if (activation_ == Activation::tanh) {
        s = std::tanh(t);
        ds = 1.0 - s * s;
      } else {
        s = std::sin(std::numbers::pi * t);
        ds = std::numbers::pi * std::cos(std::numbers::pi * t);
      }
      val[j] = pt * s;
      dd[j] = dpt * s + pt * ds * wdir;
    }
  }
}

std::vector<double> normalize_to_box(std::span<const double> y, const Box& box) {
  if (y.size() != box.dim()) fail(ErrorKind::invalid_argument, "point and box dimensions differ");
  std::vector<double> out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) out[j] = (y[j] - box.center(j)) / box.radius(j);
  return out;
}

double pou_univariate(PouKind kind, double z) noexcept {
  const double a = std::abs(z);
  if (kind == PouKind::phi_a) return a <= 1.0 ? 1.0 : 0.0;
  if (a <= 0.75) return 1.0;
  if (a <= 1.25) return 0.5 * (1.0 - std::sin(2.0 * std::numbers::pi * a));
  return 0.0;
}

double pou_univariate_derivative(PouKind kind, double z) noexcept {
  if (kind == PouKind::phi_a) return 0.0;
  const double a = std::abs(z);
  if (a < 0.75 || a >= 1.25) return 0.0;
  const double sign = z < 0.0 ? -1.0 : 1.0;
  return -std::numbers::pi * std::cos(2.0 * std::numbers::pi * a) * sign;
}

std::vector<double> pou_tensor_normalized(const BoxPartition& partition, PouKind kind, std::span<const double> y) {
  if (y.size() != partition.dim()) fail(ErrorKind::invalid_argument, "point and partition dimensions differ");
  std::vector<double> out(partition.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    const Box& box = partition.boxes()[i];
    double p = 1.0;
    for (std::size_t k = 0; k < y.size(); ++k) p *= pou_univariate(kind, (y[k] - box.center(k)) / box.radius(k));
    out[i] = p;
    sum += p;
  }
  if (!(sum > 0.0)) {
    fail(ErrorKind::degenerate_cover, "no partition-of-unity function is supported at the evaluation point");
  }
  for (double& p : out) p /= sum;
  return out;
}

FeatureValue feature_eval(const FeatureModel& model, std::size_t box, std::size_t feature, std::span<const double> y) {
  if (box >= model.num_boxes() || feature >= model.features_per_box()) {
    fail(ErrorKind::invalid_argument, "feature index out of range");
  }
  const Box& bx = model.partition().boxes()[box];
  const auto z = normalize_to_box(y, bx);
  const auto w = model.weights().w(box, feature);
  double t = model.weights().b(box, feature);
  for (std::size_t k = 0; k < z.size(); ++k) t += w[k] * z[k];
  FeatureValue out;
  out.value = activate(model.activation(), t);
  const double ds = activate_derivative(model.activation(), t);
  out.grad.resize(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) out.grad[k] = ds * w[k] * 2.0 / (bx.hi[k] - bx.lo[k]);
  return out;
}

double model_eval(const FeatureModel& model, std::span<const double> coeffs, std::span<const double> y) {
  if (coeffs.size() != model.num_columns()) fail(ErrorKind::invalid_argument, "coefficient length mismatch");
  std::vector<double> value(model.num_columns());
  std::vector<double> dd(model.num_columns());
  const std::vector<double> zero(model.dim(), 0.0);
  model.evaluate(y, zero, value, dd);
  double s = 0.0;
  for (std::size_t c = 0; c < value.size(); ++c) s += coeffs[c] * value[c];
  return s;
}

}  // namespace aprfm::basis
