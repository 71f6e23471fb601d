#pragma once

#include <stdexcept>
#include <string>

namespace pathcalc {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Path has non-finite values or an inconsistent node count.
struct invalid_path_error : error {
    using error::error;
};

/// Operation requires a non-constant path.
struct degenerate_path_error : error {
    using error::error;
};

/// Grids are misaligned, or a requested time is not a grid node.
struct grid_error : error {
    using error::error;
};

/// Requested dyadic depth exceeds what the grid supports.
struct depth_error : error {
    using error::error;
};

/// A theorem hypothesis is violated (e.g. beta + gamma <= 1).
struct hypothesis_error : error {
    using error::error;
};

/// Step-size conditions unsatisfiable even at one grid cell.
struct step_error : error {
    using error::error;
};

/// Picard iteration failed to converge or left the Holder ball.
struct picard_error : error {
    using error::error;
};

/// Covariance factorization failed after the jitter retry.
struct factorization_error : error {
    using error::error;
};

/// Quadrature refinement did not converge within its level cap.
struct quadrature_error : error {
    using error::error;
};

}  // namespace pathcalc
