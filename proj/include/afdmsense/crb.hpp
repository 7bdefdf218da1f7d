#pragma once

#include <vector>

#include "afdmsense/channel.hpp"
#include "afdmsense/sensing.hpp"
#include "afdmsense/types.hpp"

namespace afdmsense {

// Fisher information and Cramer-Rao bounds for psi = [d0, nu^T]^T under the
// Gaussian-path (m = 1) model, where the received pilot has covariance
//   Upsilon(psi) = S R(nu) diag(Omega(d0)) R(nu)^H S^H + noise_var I.
struct CrbInputs {
  PilotOperator op;      // pilot plus delay taps (defines S and the steering)
  double d0 = 0.0;       // meters
  RVec nu;               // normalized Dopplers, length L
  RVec fading_exps;      // per-path exponents, length L
  double g0 = 1.0;
  double noise_var = 0.0;

  void validate() const;
};

struct CrbResult {
  double crb_d0 = 0.0;   // meters^2
  double crb_nu1 = 0.0;  // dimensionless^2
  bool pseudo_inverse = false;  // FIM was singular; Moore-Penrose used
};

// Covariance of the affine-domain observation. Hermitian PSD with minimum
// eigenvalue >= noise_var.
CMat build_upsilon(const CrbInputs& in);

// FIM_{ij} = tr(Upsilon^{-1} dUpsilon/dpsi_j Upsilon^{-1} dUpsilon/dpsi_i),
// the positive-semidefinite form for a zero-mean circular Gaussian model.
// Solves run through a Cholesky factor of Upsilon; throws if it is singular.
RMat fim(const CrbInputs& in);

// Diagonal CRB entries for d0 and nu_1 from the inverse FIM. A singular FIM
// falls back to the eigenvalue pseudo-inverse and sets the flag.
CrbResult crb(const CrbInputs& in);

// Convenience assembly of CrbInputs from a drawn geometry at the true
// parameters, sharing the noise calibration used for synthesis.
CrbInputs crb_inputs_for(const ScenarioConfig& scn, const PathSet& ps,
                         const CVec& pilot_time);

}  // namespace afdmsense
