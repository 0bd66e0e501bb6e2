#include "state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace qpma {

namespace {

constexpr double kNormTolerance = 1e-12;

// P^{N-1-site}: stride between consecutive digit values at a site under the
// MSB-first index convention.
std::size_t site_stride(std::uint32_t prime, std::size_t sites,
                        std::size_t site) {
    std::size_t s = 1;
    for (std::size_t i = site + 1; i < sites; ++i) {
        s *= prime;
    }
    return s;
}

void check_site(std::size_t site, std::size_t sites) {
    if (site >= sites) {
        throw ValidationError("site index " + std::to_string(site) +
                              " out of range for " + std::to_string(sites) +
                              " sites");
    }
}

double norm_squared(const std::vector<Complex>& amps) {
    double s = 0.0;
    for (const Complex& a : amps) {
        s += std::norm(a);
    }
    return s;
}

} // namespace

std::size_t dense_dimension(std::uint32_t prime, std::size_t sites) {
    if (prime < 2 || sites < 1) {
        throw ValidationError("dense_dimension: need prime >= 2 and sites >= 1");
    }
    std::uint64_t dim = 1;
    for (std::size_t i = 0; i < sites; ++i) {
        dim *= prime;
        if (dim > kDenseDimensionGuard) {
            throw GuardError("dense dimension " + std::to_string(prime) + "^" +
                             std::to_string(sites) + " exceeds guard " +
                             std::to_string(kDenseDimensionGuard));
        }
    }
    return static_cast<std::size_t>(dim);
}

DenseBlockState::DenseBlockState(std::uint32_t prime, std::size_t sites,
                                 std::vector<Complex> amplitudes)
    : prime_(prime), sites_(sites), amps_(std::move(amplitudes)) {
    const std::size_t dim = dense_dimension(prime, sites);
    if (amps_.size() != dim) {
        throw ValidationError("amplitude vector length " +
                              std::to_string(amps_.size()) +
                              " does not match dimension " +
                              std::to_string(dim));
    }
    if (std::abs(norm_squared(amps_) - 1.0) > kNormTolerance) {
        throw ValidationError("state is not normalized");
    }
}

DenseBlockState DenseBlockState::basis(
    std::uint32_t prime, std::size_t sites,
    const std::vector<std::uint32_t>& digits) {
    if (digits.size() != sites) {
        throw ValidationError("basis: digit count does not match site count");
    }
    const std::size_t dim = dense_dimension(prime, sites);
    std::size_t index = 0;
    for (std::uint32_t d : digits) {
        if (d >= prime) {
            throw ValidationError("basis: digit out of range");
        }
        index = index * prime + d;
    }
    std::vector<Complex> amps(dim, Complex(0.0, 0.0));
    amps[index] = Complex(1.0, 0.0);
    return DenseBlockState(prime, sites, std::move(amps));
}

std::uint32_t DenseBlockState::digit(std::size_t index,
                                     std::size_t site) const {
    return static_cast<std::uint32_t>(
        index / site_stride(prime_, sites_, site) % prime_);
}

PhaseBlockState::PhaseBlockState(std::uint32_t prime, std::size_t sites)
    : prime_(prime), sites_(sites), exps_(prime, 0) {
    if (prime < 2 || sites < 1) {
        throw ValidationError("PhaseBlockState: need prime >= 2 and sites >= 1");
    }
}

PhaseBlockState::PhaseBlockState(std::uint32_t prime, std::size_t sites,
                                 std::vector<std::uint32_t> exponents)
    : prime_(prime), sites_(sites), exps_(std::move(exponents)) {
    if (exps_.size() != prime) {
        throw ValidationError("PhaseBlockState: need exactly P exponents");
    }
    for (std::uint32_t e : exps_) {
        if (e >= prime) {
            throw ValidationError("PhaseBlockState: exponent out of range");
        }
    }
}

PhaseBlockState PhaseBlockState::fourier(std::uint32_t prime,
                                         std::size_t sites, std::uint32_t m) {
    std::vector<std::uint32_t> exps(prime);
    for (std::uint32_t k = 0; k < prime; ++k) {
        exps[k] = static_cast<std::uint32_t>(
            static_cast<std::uint64_t>(m) * k % prime);
    }
    return PhaseBlockState(prime, sites, std::move(exps));
}

DenseBlockState make_psi(std::uint32_t prime, std::size_t sites) {
    return make_phi(prime, sites, 0);
}

DenseBlockState make_phi(std::uint32_t prime, std::size_t sites,
                         std::uint32_t m) {
    return structured_to_dense(PhaseBlockState::fourier(prime, sites, m));
}

DenseBlockState clock_apply(const DenseBlockState& state, std::size_t site,
                            std::uint32_t power) {
    check_site(site, state.sites());
    const PrimeField field(state.prime());
    const auto omega = field.omega_table();
    const std::uint32_t p = state.prime();
    const std::size_t stride = site_stride(p, state.sites(), site);

    std::vector<Complex> amps = state.amplitudes();
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        const std::uint32_t k = static_cast<std::uint32_t>(idx / stride % p);
        amps[idx] *= omega[field.mul(power % p, k)];
    }
    return DenseBlockState(p, state.sites(), std::move(amps));
}

DenseBlockState shift_apply(const DenseBlockState& state, std::size_t site) {
    check_site(site, state.sites());
    const std::uint32_t p = state.prime();
    const std::size_t stride = site_stride(p, state.sites(), site);

    std::vector<Complex> amps(state.dimension(), Complex(0.0, 0.0));
    for (std::size_t idx = 0; idx < amps.size(); ++idx) {
        const std::uint32_t k = static_cast<std::uint32_t>(idx / stride % p);
        const std::size_t nidx =
            k + 1 == p ? idx - static_cast<std::size_t>(p - 1) * stride
                       : idx + stride;
        amps[nidx] = state.amplitude(idx);
    }
    return DenseBlockState(p, state.sites(), std::move(amps));
}

DenseBlockState site_unitary_apply(const DenseBlockState& state,
                                   std::size_t site,
                                   const Eigen::MatrixXcd& u) {
    check_site(site, state.sites());
    const std::uint32_t p = state.prime();
    if (u.rows() != p || u.cols() != p) {
        throw ValidationError("site unitary has wrong dimension");
    }
    if ((u.adjoint() * u - Eigen::MatrixXcd::Identity(p, p)).cwiseAbs().maxCoeff() >
        1e-10) {
        throw ValidationError("site operator is not unitary");
    }
    const std::size_t stride = site_stride(p, state.sites(), site);
    const std::size_t dim = state.dimension();

    std::vector<Complex> amps(dim, Complex(0.0, 0.0));
    Eigen::VectorXcd in(p), out(p);
    for (std::size_t outer = 0; outer < dim / p; ++outer) {
        const std::size_t base = outer / stride * stride * p + outer % stride;
        for (std::uint32_t k = 0; k < p; ++k) {
            in(k) = state.amplitude(base + k * stride);
        }
        out = u * in;
        for (std::uint32_t k = 0; k < p; ++k) {
            amps[base + k * stride] = out(k);
        }
    }
    return DenseBlockState(p, state.sites(), std::move(amps));
}

PhaseBlockState structured_apply(const PhaseBlockState& state,
                                 std::size_t site, std::uint32_t power) {
    check_site(site, state.sites());
    const std::uint32_t p = state.prime();
    std::vector<std::uint32_t> exps = state.exponents();
    for (std::uint32_t k = 0; k < p; ++k) {
        exps[k] = static_cast<std::uint32_t>(
            (exps[k] + static_cast<std::uint64_t>(power % p) * k) % p);
    }
    return PhaseBlockState(p, state.sites(), std::move(exps));
}

DenseBlockState structured_to_dense(const PhaseBlockState& state) {
    const std::uint32_t p = state.prime();
    const std::size_t dim = dense_dimension(p, state.sites());
    // Index of |k...k| is k * (1 + P + ... + P^{N-1}).
    const std::size_t repunit = (dim - 1) / (p - 1);
    const PrimeField field(p);
    const auto omega = field.omega_table();
    const double scale = 1.0 / std::sqrt(static_cast<double>(p));

    std::vector<Complex> amps(dim, Complex(0.0, 0.0));
    for (std::uint32_t k = 0; k < p; ++k) {
        amps[static_cast<std::size_t>(k) * repunit] =
            scale * omega[state.exponents()[k]];
    }
    return DenseBlockState(p, state.sites(), std::move(amps));
}

std::optional<std::uint32_t> fourier_label(const PhaseBlockState& state) {
    const std::uint32_t p = state.prime();
    const std::uint32_t m = state.exponents()[1 % p];
    for (std::uint32_t k = 0; k < p; ++k) {
        if (state.exponents()[k] !=
            static_cast<std::uint64_t>(m) * k % p) {
            return std::nullopt;
        }
    }
    return m;
}

Complex inner(const DenseBlockState& a, const DenseBlockState& b) {
    if (a.prime() != b.prime() || a.sites() != b.sites()) {
        throw ValidationError("inner: dimension mismatch");
    }
    Complex s(0.0, 0.0);
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        s += std::conj(a.amplitude(i)) * b.amplitude(i);
    }
    return s;
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd matrix) : m_(std::move(matrix)) {
    if (m_.rows() != m_.cols()) {
        throw ValidationError("density matrix must be square");
    }
    if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ValidationError("density matrix is not Hermitian");
    }
    if (std::abs(m_.trace().real() - 1.0) > 1e-12 ||
        std::abs(m_.trace().imag()) > 1e-12) {
        throw ValidationError("density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        m_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -1e-10) {
        throw ValidationError("density matrix is not positive semidefinite");
    }
}

namespace {

// Flat index from kept digits r and traced digits t, with kept/traced site
// position lists both ascending.
std::size_t compose_index(const std::vector<std::size_t>& keep_strides,
                          const std::vector<std::size_t>& trace_strides,
                          std::size_t r, std::size_t t, std::uint32_t p) {
    std::size_t idx = 0;
    for (auto it = keep_strides.rbegin(); it != keep_strides.rend(); ++it) {
        idx += (r % p) * *it;
        r /= p;
    }
    for (auto it = trace_strides.rbegin(); it != trace_strides.rend(); ++it) {
        idx += (t % p) * *it;
        t /= p;
    }
    return idx;
}

} // namespace

DensityMatrix partial_trace(const DenseBlockState& state,
                            const std::vector<std::size_t>& keep_sites) {
    if (keep_sites.empty()) {
        throw ValidationError("partial_trace: keep set is empty");
    }
    std::vector<std::size_t> keep = keep_sites;
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end()) {
        throw ValidationError("partial_trace: duplicate site in keep set");
    }
    const std::size_t n = state.sites();
    check_site(keep.back(), n);

    const std::uint32_t p = state.prime();
    std::vector<std::size_t> traced;
    for (std::size_t s = 0; s < n; ++s) {
        if (!std::binary_search(keep.begin(), keep.end(), s)) {
            traced.push_back(s);
        }
    }

    std::size_t dim_keep = 1;
    for (std::size_t i = 0; i < keep.size(); ++i) {
        dim_keep *= p;
    }
    if (dim_keep > kMatrixDimensionGuard) {
        throw GuardError("partial_trace: reduced dimension exceeds guard");
    }
    std::size_t dim_traced = state.dimension() / dim_keep;

    std::vector<std::size_t> keep_strides, trace_strides;
    for (std::size_t s : keep) {
        keep_strides.push_back(site_stride(p, n, s));
    }
    for (std::size_t s : traced) {
        trace_strides.push_back(site_stride(p, n, s));
    }

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dim_keep), static_cast<Eigen::Index>(dim_keep));
    for (std::size_t r = 0; r < dim_keep; ++r) {
        for (std::size_t c = 0; c < dim_keep; ++c) {
            Complex s(0.0, 0.0);
            for (std::size_t t = 0; t < dim_traced; ++t) {
                s += state.amplitude(
                         compose_index(keep_strides, trace_strides, r, t, p)) *
                     std::conj(state.amplitude(compose_index(
                         keep_strides, trace_strides, c, t, p)));
            }
            rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = s;
        }
    }
    return DensityMatrix(std::move(rho));
}

DensityMatrix mix_ensemble(
    const std::vector<std::pair<double, DenseBlockState>>& ensemble) {
    if (ensemble.empty()) {
        throw ValidationError("mix_ensemble: empty ensemble");
    }
    double total = 0.0;
    for (const auto& [prob, st] : ensemble) {
        if (prob < 0.0) {
            throw ValidationError("mix_ensemble: negative probability");
        }
        total += prob;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("mix_ensemble: probabilities do not sum to 1");
    }
    const std::size_t dim = ensemble.front().second.dimension();
    if (dim > kMatrixDimensionGuard) {
        throw GuardError("mix_ensemble: dimension exceeds guard");
    }
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (const auto& [prob, st] : ensemble) {
        if (st.dimension() != dim) {
            throw ValidationError("mix_ensemble: dimension mismatch");
        }
        Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) {
            v(static_cast<Eigen::Index>(i)) = st.amplitude(i);
        }
        rho += prob * (v * v.adjoint());
    }
    return DensityMatrix(std::move(rho));
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dimension() != b.dimension()) {
        throw ValidationError("trace_distance: dimension mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        a.matrix() - b.matrix(), Eigen::EigenvaluesOnly);
    return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        rho.matrix(), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double lambda = solver.eigenvalues()(i);
        if (lambda > 1e-14) {
            s -= lambda * std::log2(lambda);
        }
    }
    return s;
}

BlockPvm::BlockPvm(std::uint32_t prime, std::size_t sites)
    : prime_(prime), sites_(sites), dim_(dense_dimension(prime, sites)) {
    fourier_.reserve(prime);
    for (std::uint32_t m = 0; m < prime; ++m) {
        fourier_.push_back(make_phi(prime, sites, m));
    }
}

double BlockPvm::probability(const DenseBlockState& state,
                             std::size_t label) const {
    if (state.prime() != prime_ || state.sites() != sites_) {
        throw ValidationError("measure: state does not match PVM dimensions");
    }
    if (label < fourier_.size()) {
        return std::norm(inner(fourier_[label], state));
    }
    if (label != byzantine_index()) {
        throw ValidationError("measure: unknown PVM label");
    }
    if (rank(label) == 0) {
        return 0.0;
    }
    double in_subspace = 0.0;
    for (const DenseBlockState& phi : fourier_) {
        in_subspace += std::norm(inner(phi, state));
    }
    return std::max(0.0, 1.0 - in_subspace);
}

std::size_t BlockPvm::rank(std::size_t label) const {
    return label < fourier_.size() ? 1 : dim_ - fourier_.size();
}

Eigen::MatrixXcd BlockPvm::projector(std::size_t label) const {
    if (dim_ > kMatrixDimensionGuard) {
        throw GuardError("projector: dimension exceeds guard");
    }
    const Eigen::Index d = static_cast<Eigen::Index>(dim_);
    auto rank1 = [&](const DenseBlockState& phi) {
        Eigen::VectorXcd v(d);
        for (std::size_t i = 0; i < dim_; ++i) {
            v(static_cast<Eigen::Index>(i)) = phi.amplitude(i);
        }
        return Eigen::MatrixXcd(v * v.adjoint());
    };
    if (label < fourier_.size()) {
        return rank1(fourier_[label]);
    }
    if (label != byzantine_index()) {
        throw ValidationError("projector: unknown PVM label");
    }
    Eigen::MatrixXcd complement = Eigen::MatrixXcd::Identity(d, d);
    for (const DenseBlockState& phi : fourier_) {
        complement -= rank1(phi);
    }
    return complement;
}

Eigen::MatrixXcd haar_unitary(std::uint32_t dim, RandomStream& rng) {
    Eigen::MatrixXcd g(dim, dim);
    for (std::uint32_t r = 0; r < dim; ++r) {
        for (std::uint32_t c = 0; c < dim; ++c) {
            g(r, c) = Complex(rng.normal(), rng.normal());
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (std::uint32_t i = 0; i < dim; ++i) {
        const Complex d = r(i, i);
        q.col(i) *= std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0, 0.0);
    }
    return q;
}

MeasurementOutcome measure(const DenseBlockState& state, const BlockPvm& pvm,
                           RandomStream& rng) {
    std::vector<double> probs(pvm.label_count());
    double total = 0.0;
    for (std::size_t label = 0; label < pvm.label_count(); ++label) {
        probs[label] = pvm.probability(state, label);
        total += probs[label];
    }
    if (std::abs(total - 1.0) > 1e-10) {
        throw ValidationError("measure: probabilities do not sum to 1");
    }

    const double u = rng.uniform01() * total;
    double cumulative = 0.0;
    std::size_t chosen = pvm.label_count() - 1;
    for (std::size_t label = 0; label < pvm.label_count(); ++label) {
        cumulative += probs[label];
        if (u < cumulative) {
            chosen = label;
            break;
        }
    }
    // Floating-point residue can push u past the final cumulative value;
    // fall back to the last label with positive probability.
    while (probs[chosen] <= 0.0 && chosen > 0) {
        --chosen;
    }

    MeasurementOutcome outcome;
    outcome.byzantine = chosen == pvm.byzantine_index();
    outcome.label = outcome.byzantine ? 0 : static_cast<std::uint32_t>(chosen);
    outcome.probability = probs[chosen];
    return outcome;
}

} // namespace qpma
