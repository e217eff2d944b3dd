#include "vortexloop/field.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace vortexloop {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
const Complex kImag(0.0, 1.0);
}  // namespace

void ScattererSet::validate(double min_separation) const {
  if (positions.size() != strengths.size()) {
    std::ostringstream os;
    os << "scatterer set has " << positions.size() << " positions but "
       << strengths.size() << " strengths";
    throw ConfigError(os.str());
  }
  for (std::size_t j = 0; j < strengths.size(); ++j) {
    if (!std::isfinite(strengths[j])) {
      std::ostringstream os;
      os << "scatterer " << j << " has non-finite strength";
      throw ConfigError(os.str());
    }
    if (!positions[j].allFinite()) {
      std::ostringstream os;
      os << "scatterer " << j << " has non-finite position";
      throw ConfigError(os.str());
    }
  }
  for (std::size_t j = 0; j < positions.size(); ++j) {
    for (std::size_t l = j + 1; l < positions.size(); ++l) {
      if ((positions[j] - positions[l]).norm() < min_separation) {
        std::ostringstream os;
        os << "scatterers " << j << " and " << l << " coincide";
        throw ConfigError(os.str());
      }
    }
  }
}

void IncidentWave::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw ConfigError("wavenumber k must be a positive finite real");
  }
  if (std::abs(direction.norm() - 1.0) > 1e-12) {
    throw ConfigError("incident direction must be a unit vector");
  }
}

Complex green_regularized(double k, const Vec3& x) {
  const double r = x.norm();
  if (r == 0.0) return Complex(0.0, 0.0);
  return std::exp(kImag * k * r) / (kFourPi * r);
}

GammaMatrix assemble_gamma(const ScattererSet& scatterers, double k) {
  scatterers.validate();
  if (!(k > 0.0)) throw ConfigError("wavenumber k must be positive");
  const int n = scatterers.size();
  GammaMatrix gamma;
  gamma.k = k;
  gamma.entries.resize(n, n);
  const Complex diag_shift = -kImag * k / kFourPi;
  for (int j = 0; j < n; ++j) {
    gamma.entries(j, j) = scatterers.strengths[j] + diag_shift;
    for (int l = j + 1; l < n; ++l) {
      const Complex off =
          -green_regularized(k, scatterers.positions[j] - scatterers.positions[l]);
      gamma.entries(j, l) = off;
      gamma.entries(l, j) = off;
    }
  }
  return gamma;
}

FieldSample WaveField::sample(const Vec3& point, double rho_floor) const {
  FieldSample s;
  s.psi = psi(point);
  s.grad = grad_psi(point);
  s.rho = std::norm(s.psi);
  const CVec3 weighted = std::conj(s.psi) * s.grad;
  s.current = weighted.imag();
  if (s.rho >= rho_floor) {
    s.velocity = s.current / s.rho;
  }
  return s;
}

FieldState FieldState::solve(ScattererSet scatterers, IncidentWave wave,
                             double cond_cap) {
  wave.validate();
  const int n = scatterers.size();
  if (n == 0) {
    scatterers.validate();
    return FieldState(std::move(scatterers), std::move(wave),
                      Eigen::VectorXcd());
  }
  GammaMatrix gamma = assemble_gamma(scatterers, wave.k);

  Eigen::VectorXcd rhs(n);
  for (int j = 0; j < n; ++j) {
    rhs(j) = std::exp(kImag * wave.k * wave.direction.dot(scatterers.positions[j]));
  }

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(gamma.entries);
  const double rcond = lu.rcond();
  if (!(rcond > 0.0) || 1.0 / rcond > cond_cap) {
    std::ostringstream os;
    os << "Gamma matrix numerically singular at k = " << wave.k
       << " (condition estimate "
       << (rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity())
       << " exceeds cap " << cond_cap << ")";
    throw ResonanceError(os.str());
  }
  Eigen::VectorXcd q = lu.solve(rhs);

  const double residual =
      (gamma.entries * q - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (residual > 1e-10) {
    std::ostringstream os;
    os << "Gamma solve residual " << residual << " exceeds 1e-10 at k = "
       << wave.k;
    throw ResonanceError(os.str());
  }
  return FieldState(std::move(scatterers), std::move(wave), std::move(q));
}

void FieldState::check_exclusion(const Vec3& point) const {
  for (int j = 0; j < scatterers_.size(); ++j) {
    if ((point - scatterers_.positions[j]).norm() <= exclusion_radius_) {
      std::ostringstream os;
      os << "evaluation point within exclusion radius of scatterer " << j;
      throw SingularityError(os.str());
    }
  }
}

Complex FieldState::psi(const Vec3& point) const {
  check_exclusion(point);
  const double k = wave_.k;
  Complex value = std::exp(kImag * k * wave_.direction.dot(point));
  for (int j = 0; j < scatterers_.size(); ++j) {
    const Vec3 rel = point - scatterers_.positions[j];
    const double r = rel.norm();
    value += amplitudes_(j) * std::exp(kImag * k * r) / (kFourPi * r);
  }
  return value;
}

CVec3 FieldState::grad_psi(const Vec3& point) const {
  check_exclusion(point);
  const double k = wave_.k;
  const Complex plane = std::exp(kImag * k * wave_.direction.dot(point));
  CVec3 grad = (kImag * k * plane) * wave_.direction.cast<Complex>();
  for (int j = 0; j < scatterers_.size(); ++j) {
    const Vec3 rel = point - scatterers_.positions[j];
    const double r = rel.norm();
    const Complex radial = amplitudes_(j) * (kImag * k - 1.0 / r) *
                           std::exp(kImag * k * r) / (kFourPi * r);
    grad += (radial / r) * rel.cast<Complex>();
  }
  return grad;
}

std::pair<Complex, Complex> FieldState::local_expansion_coeffs(int j) const {
  if (j < 0 || j >= scatterers_.size()) {
    throw ConfigError("scatterer index out of range");
  }
  const double k = wave_.k;
  const Complex a = amplitudes_(j);
  // Regular part of psi at y_j; Gamma row j makes it equal alpha_j * q_j,
  // so the boundary-condition convention B + alpha A = 0 fixes the sign.
  Complex regular =
      std::exp(kImag * k * wave_.direction.dot(scatterers_.positions[j]));
  for (int l = 0; l < scatterers_.size(); ++l) {
    if (l == j) continue;
    regular += amplitudes_(l) *
               green_regularized(k, scatterers_.positions[j] -
                                        scatterers_.positions[l]);
  }
  regular += a * kImag * k / kFourPi;
  return {a, -regular};
}

}  // namespace vortexloop
