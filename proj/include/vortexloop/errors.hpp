#pragma once

#include <stdexcept>
#include <string>

namespace vortexloop {

/// Base class for all domain errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid scatterer configuration or run configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// Evaluation point inside the exclusion radius of a scatterer.
struct SingularityError : Error {
  using Error::Error;
};

/// Gamma matrix ill-conditioned beyond the solver cap at this wavenumber.
struct ResonanceError : Error {
  using Error::Error;
};

/// Newton refinement failed to converge to a nodal point.
struct RefineError : Error {
  using Error::Error;
};

/// Probe circle invalid: undersampled phase or amplitude below floor.
struct ProbeError : Error {
  using Error::Error;
};

/// Tube or frame geometry invalid (self-intersection, zero radius).
struct GeometryError : Error {
  using Error::Error;
};

/// File input/output failure, with file context in the message.
struct IoError : Error {
  using Error::Error;
};

}  // namespace vortexloop
