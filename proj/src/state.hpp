#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "field.hpp"
#include "rng.hpp"

namespace qpma {

using Complex = std::complex<double>;

// Largest dense amplitude-vector length P^N the simulator will allocate.
inline constexpr std::uint64_t kDenseDimensionGuard = 10'000'000;
// Largest dimension for which dense d x d matrices (projectors, density
// matrices) are materialized.
inline constexpr std::uint64_t kMatrixDimensionGuard = 4096;

// P^sites with the dense guard applied.
std::size_t dense_dimension(std::uint32_t prime, std::size_t sites);

// Full P^N complex amplitude vector for one N-qudit block, indexed by base-P
// digit strings k_0...k_{N-1} with site 0 as the most significant digit.
// This is the brute-force oracle engine. Immutable after construction.
class DenseBlockState {
public:
    DenseBlockState(std::uint32_t prime, std::size_t sites,
                    std::vector<Complex> amplitudes);

    // Computational basis string |digits[0] ... digits[N-1]>.
    static DenseBlockState basis(std::uint32_t prime, std::size_t sites,
                                 const std::vector<std::uint32_t>& digits);

    std::uint32_t prime() const { return prime_; }
    std::size_t sites() const { return sites_; }
    std::size_t dimension() const { return amps_.size(); }
    const std::vector<Complex>& amplitudes() const { return amps_; }
    Complex amplitude(std::size_t index) const { return amps_[index]; }

    // Base-P digit of a flat index at the given site.
    std::uint32_t digit(std::size_t index, std::size_t site) const;

private:
    std::uint32_t prime_;
    std::size_t sites_;
    std::vector<Complex> amps_;
};

// GHZ-subspace state (1/sqrt(P)) sum_k omega^{e_k} |k...k>, stored as the P
// integer exponents e_k. Exact: no floating point until conversion. This is
// the fast engine the protocol runs on.
class PhaseBlockState {
public:
    // psi = phi_0, all exponents zero.
    PhaseBlockState(std::uint32_t prime, std::size_t sites);

    PhaseBlockState(std::uint32_t prime, std::size_t sites,
                    std::vector<std::uint32_t> exponents);

    // phi_m: e_k = m * k mod P.
    static PhaseBlockState fourier(std::uint32_t prime, std::size_t sites,
                                   std::uint32_t m);

    std::uint32_t prime() const { return prime_; }
    std::size_t sites() const { return sites_; }
    const std::vector<std::uint32_t>& exponents() const { return exps_; }

private:
    std::uint32_t prime_;
    std::size_t sites_;
    std::vector<std::uint32_t> exps_;
};

// (1/sqrt(P)) sum_k |k...k>.
DenseBlockState make_psi(std::uint32_t prime, std::size_t sites);

// (1/sqrt(P)) sum_k omega^{mk} |k...k>.
DenseBlockState make_phi(std::uint32_t prime, std::size_t sites,
                         std::uint32_t m);

// Clock operation Z^power on one site: amplitude of string (k_0...k_{N-1})
// picks up omega^{power * k_site}. Norm preserving.
DenseBlockState clock_apply(const DenseBlockState& state, std::size_t site,
                            std::uint32_t power);

// Cyclic shift |k> -> |k+1 mod P> on one site.
DenseBlockState shift_apply(const DenseBlockState& state, std::size_t site);

// Arbitrary single-qudit unitary on one site. u must be P x P and unitary
// within 1e-10.
DenseBlockState site_unitary_apply(const DenseBlockState& state,
                                   std::size_t site,
                                   const Eigen::MatrixXcd& u);

// Z^power on the GHZ subspace: e_k <- e_k + power * k mod P. The site is
// validated but does not affect the result.
PhaseBlockState structured_apply(const PhaseBlockState& state,
                                 std::size_t site, std::uint32_t power);

DenseBlockState structured_to_dense(const PhaseBlockState& state);

// m such that e_k = m * k mod P for all k, if the exponent vector has that
// form (exact integer test).
std::optional<std::uint32_t> fourier_label(const PhaseBlockState& state);

// <a|b>, conjugate-linear in the first argument.
Complex inner(const DenseBlockState& a, const DenseBlockState& b);

// Hermitian, unit-trace, positive semidefinite matrix. Invariants are
// enforced at construction.
class DensityMatrix {
public:
    explicit DensityMatrix(Eigen::MatrixXcd matrix);

    const Eigen::MatrixXcd& matrix() const { return m_; }
    Eigen::Index dimension() const { return m_.rows(); }

private:
    Eigen::MatrixXcd m_;
};

// Reduced density matrix on the kept sites (ascending site indices, kept
// order preserved). keep_sites must be a nonempty subset of [N].
DensityMatrix partial_trace(const DenseBlockState& state,
                            const std::vector<std::size_t>& keep_sites);

// sum_j p_j |psi_j><psi_j|. Probabilities must be nonnegative and sum to 1
// within 1e-12.
DensityMatrix mix_ensemble(
    const std::vector<std::pair<double, DenseBlockState>>& ensemble);

// (1/2) sum |eigenvalues of (a - b)|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// -tr(rho log2 rho) via the eigenvalue spectrum.
double von_neumann_entropy(const DensityMatrix& rho);

// Partial PVM for one N-qudit block: one rank-1 projector |phi_m><phi_m| per
// Fourier label m in [P], plus the rank-(P^N - P) complement projector that
// flags Byzantine behavior. Labels are ordered m = 0..P-1, then Byzantine.
class BlockPvm {
public:
    BlockPvm(std::uint32_t prime, std::size_t sites);

    std::uint32_t prime() const { return prime_; }
    std::size_t sites() const { return sites_; }
    std::size_t dimension() const { return dim_; }

    // Number of labels: P Fourier outcomes plus the Byzantine complement.
    std::size_t label_count() const { return fourier_.size() + 1; }
    std::size_t byzantine_index() const { return fourier_.size(); }

    const DenseBlockState& fourier_state(std::uint32_t m) const {
        return fourier_[m];
    }

    // tr(P_label |xi><xi|) for a pure state xi.
    double probability(const DenseBlockState& state, std::size_t label) const;

    std::size_t rank(std::size_t label) const;

    // Materialized projector matrix (guarded by kMatrixDimensionGuard).
    Eigen::MatrixXcd projector(std::size_t label) const;

private:
    std::uint32_t prime_;
    std::size_t sites_;
    std::size_t dim_;
    std::vector<DenseBlockState> fourier_;
};

// Haar-distributed random unitary (QR of a complex Ginibre matrix with the
// R-diagonal phases folded in).
Eigen::MatrixXcd haar_unitary(std::uint32_t dim, RandomStream& rng);

struct MeasurementOutcome {
    bool byzantine = false;
    std::uint32_t label = 0;   // Fourier index m, meaningful when !byzantine
    double probability = 0.0;  // probability of the sampled projector
};

// Samples a PVM outcome by inverse CDF over the label order (m ascending,
// Byzantine last). Deterministic given the stream state.
MeasurementOutcome measure(const DenseBlockState& state, const BlockPvm& pvm,
                           RandomStream& rng);

} // namespace qpma
