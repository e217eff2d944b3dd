#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "vortexloop/errors.hpp"

namespace vortexloop {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;

/// Positions y_j and strengths alpha_j of the point interactions.
/// alpha = 0 is a valid, maximally coupled value; the free case is the
/// alpha -> infinity limit.
struct ScattererSet {
  std::vector<Vec3> positions;
  std::vector<double> strengths;

  int size() const { return static_cast<int>(positions.size()); }

  /// Throws ConfigError on mismatched lengths, non-finite strengths or
  /// coincident positions (separation below min_separation).
  void validate(double min_separation = 1e-9) const;
};

/// Incident plane wave: wavenumber k > 0 and a unit propagation direction.
struct IncidentWave {
  double k = 1.0;
  Vec3 direction = Vec3(1.0, 0.0, 0.0);

  void validate() const;
};

/// N x N complex symmetric coupling matrix at a fixed wavenumber.
/// Diagonal: alpha_j - ik/4pi. Off-diagonal (j,l): -exp(ik|y_j-y_l|)/(4pi|y_j-y_l|).
struct GammaMatrix {
  Eigen::MatrixXcd entries;
  double k = 0.0;
};

/// Free Helmholtz kernel exp(ik|x|)/(4pi|x|), zero at x = 0.
Complex green_regularized(double k, const Vec3& x);

GammaMatrix assemble_gamma(const ScattererSet& scatterers, double k);

/// Pointwise field evaluation: value, gradient, density, current, velocity.
/// velocity is absent when rho is below the floor (the nodal set is exactly
/// where it is singular).
struct FieldSample {
  Complex psi;
  CVec3 grad;
  double rho = 0.0;
  Vec3 current = Vec3::Zero();
  std::optional<Vec3> velocity;
};

/// Anything that can be evaluated as a complex scalar field with gradient.
/// FieldState is the production implementation; tests plug in synthetic
/// fields (e.g. a canonical vortex) through the same interface.
class WaveField {
 public:
  virtual ~WaveField() = default;
  virtual Complex psi(const Vec3& point) const = 0;
  virtual CVec3 grad_psi(const Vec3& point) const = 0;
  /// Wavenumber used for local Bessel expansions; synthetic test fields
  /// keep the default.
  virtual double wavenumber() const { return 1.0; }

  FieldSample sample(const Vec3& point, double rho_floor = 1e-14) const;
};

/// Immutable solved scattering state: precomputed source amplitudes
/// q_j = sum_l [Gamma^-1]_{jl} exp(ik<d,y_l>) enabling O(N) evaluation of
/// psi and grad psi at arbitrary points. Pure and thread-safe after
/// construction.
class FieldState : public WaveField {
 public:
  /// Assembles Gamma, solves Gamma q = rhs and checks the residual.
  /// Throws ResonanceError when the condition estimate exceeds cond_cap.
  static FieldState solve(ScattererSet scatterers, IncidentWave wave,
                          double cond_cap = 1e12);

  Complex psi(const Vec3& point) const override;
  CVec3 grad_psi(const Vec3& point) const override;
  double wavenumber() const override { return wave_.k; }

  /// Coefficients of the local expansion psi ~ A/(4pi r) + O(1) at
  /// scatterer j, reported in the convention where B + alpha_j A = 0.
  std::pair<Complex, Complex> local_expansion_coeffs(int j) const;

  const ScattererSet& scatterers() const { return scatterers_; }
  const IncidentWave& wave() const { return wave_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  double exclusion_radius() const { return exclusion_radius_; }

 private:
  FieldState(ScattererSet scatterers, IncidentWave wave,
             Eigen::VectorXcd amplitudes)
      : scatterers_(std::move(scatterers)),
        wave_(std::move(wave)),
        amplitudes_(std::move(amplitudes)) {}

  void check_exclusion(const Vec3& point) const;

  ScattererSet scatterers_;
  IncidentWave wave_;
  Eigen::VectorXcd amplitudes_;
  double exclusion_radius_ = 1e-9;
};

}  // namespace vortexloop
