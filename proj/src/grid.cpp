#include "vibronic/grid.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "vibronic/errors.hpp"

namespace vibronic {
namespace {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SpatialGrid::SpatialGrid(double r_min, double r_max, std::size_t n_points)
    : r_min_(r_min), r_max_(r_max), n_points_(n_points) {
  if (!std::isfinite(r_min) || !std::isfinite(r_max) || !(r_max > r_min)) {
    throw std::invalid_argument("SpatialGrid: require finite r_max > r_min");
  }
  if (n_points < kMinPoints) {
    throw std::invalid_argument("SpatialGrid: need at least 8 points");
  }
  spacing_ = (r_max - r_min) / static_cast<double>(n_points + 1);
}

Eigen::VectorXd SpatialGrid::points() const {
  Eigen::VectorXd r(static_cast<Eigen::Index>(n_points_));
  for (std::size_t k = 0; k < n_points_; ++k) r[static_cast<Eigen::Index>(k)] = point(k);
  return r;
}

double SpatialGrid::mode_wavenumber(std::size_t m) const noexcept {
  return static_cast<double>(m) * std::numbers::pi / length();
}

RadialWavefunction::RadialWavefunction(const SpatialGrid& grid)
    : grid_(grid), amplitudes_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()))) {}

RadialWavefunction::RadialWavefunction(const SpatialGrid& grid, Eigen::VectorXcd amplitudes)
    : grid_(grid), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != grid_.size()) {
    throw std::invalid_argument("RadialWavefunction: amplitude count differs from grid size");
  }
}

double RadialWavefunction::norm_squared() const {
  return grid_.spacing() * amplitudes_.squaredNorm();
}

void RadialWavefunction::normalize() {
  const double n2 = norm_squared();
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw std::domain_error("RadialWavefunction::normalize: zero or non-finite norm");
  }
  amplitudes_ /= std::sqrt(n2);
}

cdouble inner_product(const RadialWavefunction& a, const RadialWavefunction& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch();
  return a.grid().spacing() * a.amplitudes().dot(b.amplitudes());
}

RadialWavefunction gaussian_wavepacket(const SpatialGrid& grid, double center, double width,
                                       double momentum) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian_wavepacket: width must be positive");
  auto psi = RadialWavefunction::sample(grid, [&](double r) {
    const double x = r - center;
    return std::exp(cdouble(-x * x / (4.0 * width * width), momentum * r));
  });
  psi.normalize();
  return psi;
}

RadialWavefunction sine_mode(const SpatialGrid& grid, std::size_t m) {
  if (m == 0 || m > grid.size()) throw std::out_of_range("sine_mode: mode index out of range");
  const double k = grid.mode_wavenumber(m);
  return RadialWavefunction::sample(grid, [&](double r) { return std::sin(k * (r - grid.r_min())); });
}

Eigen::VectorXd centrifugal_term(const SpatialGrid& grid, double mass, int J) {
  if (!(mass > 0.0)) throw std::invalid_argument("centrifugal_term: mass must be positive");
  if (J < 0) throw std::invalid_argument("centrifugal_term: J must be non-negative");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  if (J == 0) return out;
  if (grid.point(0) <= 0.0) {
    throw std::invalid_argument("centrifugal_term: grid contains R <= 0");
  }
  const double jj = static_cast<double>(J) * static_cast<double>(J + 1);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = grid.point(k);
    out[static_cast<Eigen::Index>(k)] = jj / (2.0 * mass * r * r);
  }
  return out;
}

// In-place DST-I over the real and imaginary parts of an interleaved complex
// array (two transforms of length n, stride 2).
struct KineticOperator::Plan {
  fftw_plan handle = nullptr;

  explicit Plan(std::size_t n) {
    std::vector<double> scratch(2 * n);
    const int len = static_cast<int>(n);
    const fftw_r2r_kind kind = FFTW_RODFT00;
    std::lock_guard lock(fftw_planner_mutex());
    handle = fftw_plan_many_r2r(1, &len, 2, scratch.data(), nullptr, 2, 1, scratch.data(), nullptr,
                                2, 1, &kind, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (handle == nullptr) throw std::runtime_error("KineticOperator: FFTW planning failed");
  }
  ~Plan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(handle);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void execute(cdouble* data) const {
    double* p = reinterpret_cast<double*>(data);
    fftw_execute_r2r(handle, p, p);
  }
};

KineticOperator::KineticOperator(const SpatialGrid& grid, double mass)
    : grid_(grid), mass_(mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("KineticOperator: mass must be positive");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  mode_energies_.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double k = grid.mode_wavenumber(static_cast<std::size_t>(j + 1));
    mode_energies_[j] = k * k / (2.0 * mass);
  }
  plan_ = std::make_shared<const Plan>(grid.size());
}

double KineticOperator::max_energy() const noexcept {
  return mode_energies_[mode_energies_.size() - 1];
}

void KineticOperator::apply(std::span<const cdouble> in, std::span<cdouble> out) const {
  const std::size_t n = grid_.size();
  if (in.size() != n || out.size() != n) throw GridMismatch();
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  plan_->execute(out.data());
  // DST-I applied twice is 2(n+1) times the identity.
  const double scale = 1.0 / (2.0 * static_cast<double>(n + 1));
  for (std::size_t j = 0; j < n; ++j) out[j] *= mode_energies_[static_cast<Eigen::Index>(j)] * scale;
  plan_->execute(out.data());
}

RadialWavefunction KineticOperator::apply(const RadialWavefunction& psi) const {
  if (!(psi.grid() == grid_)) throw GridMismatch();
  RadialWavefunction out(grid_);
  apply(std::span<const cdouble>(psi.amplitudes().data(), psi.size()),
        std::span<cdouble>(out.amplitudes().data(), out.size()));
  return out;
}

Eigen::MatrixXd KineticOperator::dense_matrix() const {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  const double np1 = static_cast<double>(n + 1);
  const double c = std::sqrt(2.0 / np1);
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index m = 0; m < n; ++m) {
      s(j, m) = c * std::sin(std::numbers::pi * static_cast<double>((j + 1) * (m + 1)) / np1);
    }
  }
  Eigen::MatrixXd t = s * mode_energies_.asDiagonal() * s;
  return 0.5 * (t + t.transpose());
}

RadialWavefunction KineticOperator::apply_dense(const RadialWavefunction& psi) const {
  if (!(psi.grid() == grid_)) throw GridMismatch();
  const Eigen::MatrixXd t = dense_matrix();
  return {grid_, (t.cast<cdouble>() * psi.amplitudes()).eval()};
}

}  // namespace vibronic
