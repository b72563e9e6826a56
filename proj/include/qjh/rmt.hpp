// Gaussian and circular random-matrix ensembles: GUE draws, the incremental
// multiplicative unitary walk, Haar-distributed unitaries, and eigenphase
// spacing statistics.
#pragma once

#include <vector>

#include "qjh/numkernel.hpp"
#include "qjh/rng.hpp"

namespace qjh::rmt {

// Hermitian draw scaled so that E[(1/N) tr M^2] = 1: off-diagonal real and
// imaginary parts are i.i.d. N(0, 1/(2N)), diagonal entries N(0, 1/N).
ComplexMatrix sample_gue(Index n, Rng& rng);

// State of the multiplicative walk U(tau + dtau) = U(tau) exp(i sqrt(dtau) M).
struct UnitaryWalkState {
  ComplexMatrix unitary;
  double tau = 0.0;
  double step = 0.01;  // dtau
  int steps_since_correction = 0;

  static UnitaryWalkState identity(Index n, double step);
};

// Advance the walk by one increment; re-unitarizes via polar decomposition
// every 100 steps or whenever the drift exceeds 1e-8.
void cue_step(UnitaryWalkState& state, Rng& rng);

// The unitary increment exp(i sqrt(dtau) M) with a fresh GUE M.
ComplexMatrix cue_increment(Index n, double dtau, Rng& rng);

// Eigenphases of a unitary matrix, ascending in (-pi, pi]. Throws on input
// that is not unitary within 1e-8.
RealVector eigenphases(const ComplexMatrix& u);

// Consecutive gaps of sorted phases on the circle, including the wrap-around
// gap; N values summing to 2 pi.
RealVector circular_spacings(const RealVector& phases);

struct SpacingHistogram {
  RealVector centers;
  RealVector density;
  double mean_spacing = 0.0;  // after unfolding; 1 by construction
  Index samples = 0;
};

// Unfolded nearest-neighbor spacing density estimate on [0, smax]: spacings
// are multiplied by N / (2 pi) so the mean is one. Requires at least 1000
// phase sets.
SpacingHistogram spacing_statistics(const std::vector<RealVector>& phase_sets,
                                    int bins = 64, double smax = 4.0);

// Haar-distributed unitary via QR of a complex Ginibre matrix with the
// phase correction on the diagonal of R.
ComplexMatrix sample_cue_direct(Index n, Rng& rng);

}  // namespace qjh::rmt
