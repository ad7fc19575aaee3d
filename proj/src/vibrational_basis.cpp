#include "vibronic/vibrational_basis.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "vibronic/errors.hpp"
#include "vibronic/format.hpp"
#include "vibronic/units.hpp"

namespace vibronic {

VibrationalBasis::VibrationalBasis(std::size_t channel, double mass, int J, double asymptote,
                                   std::vector<VibrationalLevel> levels)
    : channel_(channel), mass_(mass), J_(J), asymptote_(asymptote), levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("VibrationalBasis: no levels");
}

Eigen::MatrixXcd VibrationalBasis::amplitude_matrix() const {
  const auto n = static_cast<Eigen::Index>(grid().size());
  Eigen::MatrixXcd m(n, static_cast<Eigen::Index>(levels_.size()));
  for (std::size_t v = 0; v < levels_.size(); ++v) {
    m.col(static_cast<Eigen::Index>(v)) = levels_[v].wavefunction.amplitudes();
  }
  return m;
}

Eigen::MatrixXd dvr_hamiltonian(const SpatialGrid& grid, const PotentialCurve& curve, double mass,
                                int J) {
  Eigen::MatrixXd h = KineticOperator(grid, mass).dense_matrix();
  h.diagonal() += curve.sample(grid, mass) + centrifugal_term(grid, mass, J);
  return h;
}

namespace {

void fix_phase(Eigen::VectorXd& x) {
  const double peak = x.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    if (std::abs(x[k]) > 1e-8 * peak) {
      if (x[k] < 0.0) x = -x;
      return;
    }
  }
}

}  // namespace

VibrationalBasis solve_levels(const SpatialGrid& grid, const PotentialCurve& curve, double mass,
                              int J, const LevelSelection& selection, std::size_t channel) {
  const Eigen::MatrixXd h = dvr_hamiltonian(grid, curve, mass, J);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("solve_levels: eigensolver failed");
  const Eigen::VectorXd& energies = solver.eigenvalues();
  const double asymptote = curve.asymptote();

  std::size_t n_bound = 0;
  while (n_bound < static_cast<std::size_t>(energies.size()) &&
         energies[static_cast<Eigen::Index>(n_bound)] < asymptote - kBoundEpsilon) {
    ++n_bound;
  }

  std::size_t n_keep = 0;
  if (const auto* c = std::get_if<LevelCount>(&selection)) {
    if (c->count == 0) throw std::invalid_argument("solve_levels: need at least one level");
    if (c->count > n_bound) throw LevelShortfall(c->count, n_bound);
    n_keep = c->count;
  } else if (const auto* ceiling = std::get_if<EnergyCeiling>(&selection)) {
    while (n_keep < n_bound && energies[static_cast<Eigen::Index>(n_keep)] < ceiling->energy) {
      ++n_keep;
    }
    if (n_keep == 0) throw LevelShortfall(1, 0);
  } else {
    n_keep = static_cast<std::size_t>(energies.size());
  }

  const double inv_sqrt_dr = 1.0 / std::sqrt(grid.spacing());
  std::vector<VibrationalLevel> levels;
  levels.reserve(n_keep);
  for (std::size_t v = 0; v < n_keep; ++v) {
    Eigen::VectorXd x = solver.eigenvectors().col(static_cast<Eigen::Index>(v)) * inv_sqrt_dr;
    fix_phase(x);
    levels.push_back({v, energies[static_cast<Eigen::Index>(v)],
                      RadialWavefunction(grid, x.cast<cdouble>())});
  }
  return {channel, mass, J, asymptote, std::move(levels)};
}

std::size_t last_bound_level(const VibrationalBasis& basis) {
  std::size_t count = 0;
  for (const auto& level : basis.levels()) {
    if (level.energy < basis.asymptote() - kBoundEpsilon) ++count;
  }
  if (count == 0) throw LevelShortfall(1, 0);
  return count - 1;
}

std::size_t count_nodes(const RadialWavefunction& psi, double rel_threshold) {
  const Eigen::VectorXd re = psi.amplitudes().real();
  const double cut = rel_threshold * re.cwiseAbs().maxCoeff();
  std::size_t nodes = 0;
  int last_sign = 0;
  for (Eigen::Index k = 0; k < re.size(); ++k) {
    if (std::abs(re[k]) <= cut) continue;
    const int sign = re[k] > 0.0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) ++nodes;
    last_sign = sign;
  }
  return nodes;
}

FranckCondon franck_condon(const RadialWavefunction& a, const RadialWavefunction& b) {
  const cdouble overlap = inner_product(a, b);
  return {overlap, std::norm(overlap)};
}

Eigen::MatrixXcd overlap_matrix(const VibrationalBasis& a, const VibrationalBasis& b) {
  if (!(a.grid() == b.grid())) throw GridMismatch();
  return a.grid().spacing() * (a.amplitude_matrix().adjoint() * b.amplitude_matrix());
}

CoefficientVector project(const RadialWavefunction& psi, const VibrationalBasis& basis) {
  if (!(psi.grid() == basis.grid())) throw GridMismatch();
  Eigen::VectorXcd c =
      basis.grid().spacing() * (basis.amplitude_matrix().adjoint() * psi.amplitudes());
  const double residual = psi.norm_squared() - c.squaredNorm();
  return {basis.channel(), std::move(c), residual};
}

RadialWavefunction reconstruct(const CoefficientVector& c, const VibrationalBasis& basis) {
  if (static_cast<std::size_t>(c.coefficients.size()) != basis.size()) {
    throw std::invalid_argument("reconstruct: coefficient count differs from basis size");
  }
  return {basis.grid(), (basis.amplitude_matrix() * c.coefficients).eval()};
}

void write_levels_csv(std::ostream& out, const VibrationalBasis& basis) {
  out << "v,E_cm1\n";
  for (const auto& level : basis.levels()) {
    out << level.v << ',' << format_double(units::energy_from_internal(level.energy)) << '\n';
  }
}

void write_wavefunction_csv(std::ostream& out, const RadialWavefunction& psi) {
  out << "R_a0,re,im\n";
  for (std::size_t k = 0; k < psi.size(); ++k) {
    const cdouble a = psi.amplitudes()[static_cast<Eigen::Index>(k)];
    out << format_double(psi.grid().point(k)) << ',' << format_double(a.real()) << ','
        << format_double(a.imag()) << '\n';
  }
}

}  // namespace vibronic
