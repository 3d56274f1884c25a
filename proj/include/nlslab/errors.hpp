#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

/// Base for runtime numerical failures (distinct from configuration errors,
/// which use std::invalid_argument).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Solution left the representable range; carries the detection time.
struct BlowUpError : NumericalError {
    double t;
    explicit BlowUpError(double time)
        : NumericalError("blow-up detected at t = " + std::to_string(time)), t(time) {}
};

/// No localized purely-imaginary eigenpair found.
struct SpectralFailure : NumericalError {
    using NumericalError::NumericalError;
};

/// Biorthogonal frame Gram system too ill-conditioned.
struct FrameDegeneracy : NumericalError {
    using NumericalError::NumericalError;
};

/// Newton iteration for the modulation parameters failed to converge.
struct ExtractionFailure : NumericalError {
    double best_residual;
    ExtractionFailure(const std::string& msg, double res)
        : NumericalError(msg), best_residual(res) {}
};

/// Root-find over the unstable coefficients failed.
struct ShootingFailure : NumericalError {
    using NumericalError::NumericalError;
};

/// A quantitative verifier reported a violated bound.
struct VerifierFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace nlslab
