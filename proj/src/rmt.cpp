#include "qjh/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qjh::rmt {

namespace {
constexpr double kUnitarityTol = 1e-8;
constexpr int kPolarEvery = 100;

double unitarity_defect(const ComplexMatrix& u) {
  const Index n = u.rows();
  return (u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm();
}

ComplexMatrix polar_unitary(const ComplexMatrix& u) {
  Eigen::JacobiSVD<ComplexMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}
}  // namespace

ComplexMatrix sample_gue(Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_gue: dimension must be >= 1");
  const double off_sd = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  const double diag_sd = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexMatrix m(n, n);
  for (Index j = 0; j < n; ++j) {
    m(j, j) = Complex(diag_sd * rng.normal(), 0.0);
    for (Index k = j + 1; k < n; ++k) {
      const Complex z(off_sd * rng.normal(), off_sd * rng.normal());
      m(j, k) = z;
      m(k, j) = std::conj(z);
    }
  }
  return m;
}

UnitaryWalkState UnitaryWalkState::identity(Index n, double step) {
  UnitaryWalkState st;
  st.unitary = ComplexMatrix::Identity(n, n);
  st.step = step;
  return st;
}

ComplexMatrix cue_increment(Index n, double dtau, Rng& rng) {
  if (dtau < 0.0) throw std::invalid_argument("cue_increment: step must be >= 0");
  const ComplexMatrix m = sample_gue(n, rng);
  return expm_skew_hermitian(m, -std::sqrt(dtau));  // exp(+i sqrt(dtau) M)
}

void cue_step(UnitaryWalkState& state, Rng& rng) {
  const Index n = state.unitary.rows();
  state.unitary = state.unitary * cue_increment(n, state.step, rng);
  state.tau += state.step;
  ++state.steps_since_correction;
  if (state.steps_since_correction >= kPolarEvery ||
      unitarity_defect(state.unitary) > kUnitarityTol) {
    state.unitary = polar_unitary(state.unitary);
    state.steps_since_correction = 0;
  }
}

RealVector eigenphases(const ComplexMatrix& u) {
  if (u.rows() != u.cols())
    throw std::invalid_argument("eigenphases: matrix must be square");
  if (unitarity_defect(u) > kUnitarityTol)
    throw std::invalid_argument("eigenphases: input is not unitary within 1e-8");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(u, false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigenphases: eigensolver failed");
  RealVector phases(u.rows());
  for (Index k = 0; k < u.rows(); ++k) phases[k] = std::arg(solver.eigenvalues()[k]);
  std::sort(phases.begin(), phases.end());
  return phases;
}

RealVector circular_spacings(const RealVector& phases) {
  const Index n = phases.size();
  if (n < 2) throw std::invalid_argument("circular_spacings: need at least two phases");
  RealVector gaps(n);
  for (Index k = 0; k + 1 < n; ++k) gaps[k] = phases[k + 1] - phases[k];
  gaps[n - 1] = phases[0] + 2.0 * std::numbers::pi - phases[n - 1];
  return gaps;
}

SpacingHistogram spacing_statistics(const std::vector<RealVector>& phase_sets,
                                    int bins, double smax) {
  if (phase_sets.size() < 1000)
    throw std::invalid_argument("spacing_statistics: need at least 1000 phase sets");
  if (bins < 1 || smax <= 0.0)
    throw std::invalid_argument("spacing_statistics: invalid histogram layout");

  const double width = smax / bins;
  RealVector counts = RealVector::Zero(bins);
  double total_unfolded = 0.0;
  Index total = 0;
  for (const auto& phases : phase_sets) {
    const double unfold = static_cast<double>(phases.size()) / (2.0 * std::numbers::pi);
    const RealVector gaps = circular_spacings(phases);
    for (Index k = 0; k < gaps.size(); ++k) {
      const double s = gaps[k] * unfold;
      total_unfolded += s;
      ++total;
      const auto bin = static_cast<Index>(s / width);
      if (bin >= 0 && bin < bins) counts[bin] += 1.0;
    }
  }

  SpacingHistogram hist;
  hist.samples = total;
  hist.mean_spacing = total_unfolded / static_cast<double>(total);
  hist.centers.resize(bins);
  hist.density.resize(bins);
  for (Index b = 0; b < bins; ++b) {
    hist.centers[b] = (static_cast<double>(b) + 0.5) * width;
    hist.density[b] = counts[b] / (static_cast<double>(total) * width);
  }
  return hist;
}

ComplexMatrix sample_cue_direct(Index n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_cue_direct: dimension must be >= 1");
  ComplexMatrix z(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) z(j, k) = Complex(rng.normal(), rng.normal());
  Eigen::HouseholderQR<ComplexMatrix> qr(z);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    const Complex rkk = r(k, k);
    const double mag = std::abs(rkk);
    q.col(k) *= (mag > 0.0 ? rkk / mag : Complex(1.0, 0.0));
  }
  return q;
}

}  // namespace qjh::rmt
