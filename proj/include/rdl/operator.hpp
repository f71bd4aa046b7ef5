#pragma once

// Dense complex Hermitian linear algebra on small (dim <= 64) systems:
// spectral decompositions, matrix functions, tensor products, partial
// traces, pinching, and norms. Everything downstream builds on this.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rdl/errors.hpp"

namespace rdl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Numerical policy shared across the library.
namespace tol {
inline constexpr double hermiticity = 1e-12;   // per-entry |H - H^dag|
inline constexpr double support_rel = 1e-10;   // eigenvalue support cutoff, relative to lambda_max
inline constexpr double cluster_rel = 1e-9;    // relative gap for eigenvalue clustering
inline constexpr double psd_slack = 1e-9;      // tolerated negativity when an input must be PSD
inline constexpr double density_eig = 1e-10;   // tolerated negativity for density operators
inline constexpr double density_trace = 1e-10; // |tr - 1| for density operators
inline constexpr int dim_ceiling = 64;
inline constexpr double tiny_floor = 1e-300;
}  // namespace tol

class HermitianOperator {
public:
    HermitianOperator() = default;

    explicit HermitianOperator(Matrix entries, std::vector<int> factors = {})
        : entries_(std::move(entries)), factors_(std::move(factors)) {
        if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
            throw InvalidInput("HermitianOperator: entries must be square and non-empty");
        if (entries_.rows() > tol::dim_ceiling)
            throw SizeError("HermitianOperator: dimension " + std::to_string(entries_.rows()) +
                            " exceeds ceiling " + std::to_string(tol::dim_ceiling));
        const double asym = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
        if (asym > tol::hermiticity)
            throw InvalidInput("HermitianOperator: not Hermitian (max |H - H^dag| = " +
                               std::to_string(asym) + ")");
        entries_ = 0.5 * (entries_ + entries_.adjoint().eval());
        if (!factors_.empty()) {
            long prod = 1;
            for (int f : factors_) {
                if (f <= 0) throw InvalidInput("HermitianOperator: factors must be positive");
                prod *= f;
            }
            if (prod != entries_.rows())
                throw InvalidInput("HermitianOperator: factor product does not match dimension");
        }
    }

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }
    const std::vector<int>& factors() const { return factors_; }

    // Leg structure used for tensor bookkeeping: explicit factors, or the
    // whole space as a single leg when the operator is unstructured.
    std::vector<int> effective_factors() const {
        return factors_.empty() ? std::vector<int>{dim()} : factors_;
    }

    HermitianOperator with_factors(std::vector<int> factors) const {
        return HermitianOperator(entries_, std::move(factors));
    }

    double trace() const { return entries_.trace().real(); }

    HermitianOperator operator+(const HermitianOperator& o) const {
        check_same_dim(o);
        return HermitianOperator(entries_ + o.entries_, factors_);
    }
    HermitianOperator operator-(const HermitianOperator& o) const {
        check_same_dim(o);
        return HermitianOperator(entries_ - o.entries_, factors_);
    }
    friend HermitianOperator operator*(double s, const HermitianOperator& a) {
        return HermitianOperator(s * a.entries_, a.factors_);
    }

private:
    void check_same_dim(const HermitianOperator& o) const {
        if (o.dim() != dim()) throw InvalidInput("HermitianOperator: dimension mismatch");
    }

    Matrix entries_;
    std::vector<int> factors_;
};

inline HermitianOperator identity_operator(int dim, std::vector<int> factors = {}) {
    return HermitianOperator(Matrix::Identity(dim, dim), std::move(factors));
}

struct SpectralDecomposition {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // unitary, columns match eigenvalues

    Matrix reconstruct() const {
        return eigenvectors * eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
               eigenvectors.adjoint();
    }
};

inline SpectralDecomposition spectral_decompose(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.entries());
    if (solver.info() != Eigen::Success)
        throw Error("spectral_decompose: eigensolver failed");
    return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

class DensityOperator {
public:
    DensityOperator() = default;

    explicit DensityOperator(HermitianOperator op) : op_(std::move(op)) {
        const SpectralDecomposition es = spectral_decompose(op_);
        if (es.eigenvalues.minCoeff() < -tol::density_eig)
            throw InvalidInput("DensityOperator: negative eigenvalue " +
                               std::to_string(es.eigenvalues.minCoeff()));
        if (std::abs(op_.trace() - 1.0) > tol::density_trace)
            throw InvalidInput("DensityOperator: trace " + std::to_string(op_.trace()) +
                               " is not 1");
    }
    DensityOperator(Matrix entries, std::vector<int> factors = {})
        : DensityOperator(HermitianOperator(std::move(entries), std::move(factors))) {}

    const HermitianOperator& op() const { return op_; }
    const Matrix& entries() const { return op_.entries(); }
    int dim() const { return op_.dim(); }
    const std::vector<int>& factors() const { return op_.factors(); }

private:
    HermitianOperator op_;
};

// Eigenvalue support cutoff: eigenvalues at or below this magnitude count as
// zero for support-restricted matrix functions.
inline double support_cutoff(const RealVector& eigenvalues) {
    const double scale = std::max(eigenvalues.cwiseAbs().maxCoeff(), tol::tiny_floor);
    return tol::support_rel * scale;
}

// Much smaller cutoff that only separates genuine numerical zeros from tiny
// but meaningful eigenvalues; gradient kernels that diverge at 0 use this so
// that boundary derivatives stay honest down to the solver mixing floor.
inline double noise_cutoff(const RealVector& eigenvalues) {
    const double scale = std::max(eigenvalues.cwiseAbs().maxCoeff(), tol::tiny_floor);
    return 1e-14 * scale;
}

using ScalarFn = std::function<double(double)>;

inline HermitianOperator matrix_function(const HermitianOperator& h, const ScalarFn& f,
                                         bool support_only = false) {
    const SpectralDecomposition es = spectral_decompose(h);
    const double cutoff = support_cutoff(es.eigenvalues);
    RealVector mapped(es.eigenvalues.size());
    for (Eigen::Index i = 0; i < es.eigenvalues.size(); ++i) {
        const double lambda = es.eigenvalues[i];
        if (support_only && std::abs(lambda) <= cutoff) {
            mapped[i] = 0.0;
            continue;
        }
        const double value = f(lambda);
        if (!std::isfinite(value))
            throw DomainError("matrix_function: f undefined at eigenvalue " +
                              std::to_string(lambda));
        mapped[i] = value;
    }
    Matrix out = es.eigenvectors * mapped.asDiagonal().toDenseMatrix().cast<Complex>() *
                 es.eigenvectors.adjoint();
    out = 0.5 * (out + out.adjoint().eval());
    return HermitianOperator(std::move(out), h.factors());
}

// Fractional/negative powers act on the support; integer powers do not need
// the restriction but share the code path harmlessly for PSD inputs.
inline HermitianOperator mpow(const HermitianOperator& h, double p) {
    return matrix_function(h, [p](double t) { return std::pow(t, p); }, true);
}

inline HermitianOperator mlog2(const HermitianOperator& h) {
    return matrix_function(h, [](double t) { return std::log2(t); }, true);
}

inline HermitianOperator mexp(const HermitianOperator& h) {
    return matrix_function(h, [](double t) { return std::exp(t); });
}

inline HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    const int da = a.dim(), db = b.dim();
    Matrix out(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = a.entries()(i, j) * b.entries();
    std::vector<int> factors = a.effective_factors();
    const std::vector<int> bf = b.effective_factors();
    factors.insert(factors.end(), bf.begin(), bf.end());
    return HermitianOperator(std::move(out), std::move(factors));
}

namespace detail {

// Row-major leg strides: leg 0 is the most significant index.
inline std::vector<long> leg_strides(const std::vector<int>& dims) {
    std::vector<long> strides(dims.size());
    long s = 1;
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        strides[k] = s;
        s *= dims[k];
    }
    return strides;
}

}  // namespace detail

// Trace out every tensor leg not listed in `keep`; kept legs stay in their
// original relative order.
inline HermitianOperator partial_trace(const HermitianOperator& a, const std::vector<int>& keep) {
    if (a.factors().empty())
        throw InvalidInput("partial_trace: operator carries no factor metadata");
    const std::vector<int>& dims = a.factors();
    const int n_legs = static_cast<int>(dims.size());
    std::vector<bool> is_kept(n_legs, false);
    for (int k : keep) {
        if (k < 0 || k >= n_legs) throw InvalidInput("partial_trace: bad factor index");
        is_kept[k] = true;
    }
    std::vector<int> kept_legs, traced_legs;
    for (int k = 0; k < n_legs; ++k) (is_kept[k] ? kept_legs : traced_legs).push_back(k);

    const std::vector<long> strides = detail::leg_strides(dims);
    long kept_dim = 1, traced_dim = 1;
    for (int k : kept_legs) kept_dim *= dims[k];
    for (int k : traced_legs) traced_dim *= dims[k];

    // Decompose a flat kept/traced index into the original flat offset.
    auto offset_of = [&](const std::vector<int>& legs, long flat) {
        long off = 0;
        for (int k = static_cast<int>(legs.size()) - 1; k >= 0; --k) {
            const int d = dims[legs[k]];
            off += (flat % d) * strides[legs[k]];
            flat /= d;
        }
        return off;
    };

    Matrix out = Matrix::Zero(kept_dim, kept_dim);
    for (long i = 0; i < kept_dim; ++i) {
        const long ri = offset_of(kept_legs, i);
        for (long j = 0; j < kept_dim; ++j) {
            const long cj = offset_of(kept_legs, j);
            Complex sum = 0;
            for (long t = 0; t < traced_dim; ++t) {
                const long o = offset_of(traced_legs, t);
                sum += a.entries()(ri + o, cj + o);
            }
            out(i, j) = sum;
        }
    }
    std::vector<int> new_factors;
    for (int k : kept_legs) new_factors.push_back(dims[k]);
    return HermitianOperator(std::move(out), std::move(new_factors));
}

// Reorder tensor legs: result leg p is the source leg perm[p].
inline HermitianOperator permute_factors(const HermitianOperator& a, const std::vector<int>& perm) {
    if (a.factors().empty())
        throw InvalidInput("permute_factors: operator carries no factor metadata");
    const std::vector<int>& dims = a.factors();
    const int n_legs = static_cast<int>(dims.size());
    if (static_cast<int>(perm.size()) != n_legs)
        throw InvalidInput("permute_factors: permutation size mismatch");
    std::vector<bool> seen(n_legs, false);
    for (int p : perm) {
        if (p < 0 || p >= n_legs || seen[p]) throw InvalidInput("permute_factors: not a permutation");
        seen[p] = true;
    }

    std::vector<int> new_dims(n_legs);
    for (int p = 0; p < n_legs; ++p) new_dims[p] = dims[perm[p]];
    const std::vector<long> old_strides = detail::leg_strides(dims);
    const std::vector<long> new_strides = detail::leg_strides(new_dims);
    const long dim = a.dim();

    // Map each new flat index to the old flat index.
    std::vector<long> old_of(dim);
    for (long idx = 0; idx < dim; ++idx) {
        long rem = idx, off = 0;
        for (int p = 0; p < n_legs; ++p) {
            const long digit = rem / new_strides[p];
            rem %= new_strides[p];
            off += digit * old_strides[perm[p]];
        }
        old_of[idx] = off;
    }
    Matrix out(dim, dim);
    for (long i = 0; i < dim; ++i)
        for (long j = 0; j < dim; ++j) out(i, j) = a.entries()(old_of[i], old_of[j]);
    return HermitianOperator(std::move(out), std::move(new_dims));
}

// Consecutive eigenvalue clusters under the relative-gap rule. Input must be
// sorted ascending; returns [begin, end) column ranges.
inline std::vector<std::pair<int, int>> eigenvalue_clusters(const RealVector& eigenvalues) {
    std::vector<std::pair<int, int>> clusters;
    const int n = static_cast<int>(eigenvalues.size());
    int begin = 0;
    for (int i = 1; i < n; ++i) {
        const double gap = eigenvalues[i] - eigenvalues[i - 1];
        const double scale = std::max({std::abs(eigenvalues[i]), std::abs(eigenvalues[i - 1]),
                                       tol::tiny_floor});
        if (gap > tol::cluster_rel * scale) {
            clusters.emplace_back(begin, i);
            begin = i;
        }
    }
    clusters.emplace_back(begin, n);
    return clusters;
}

// Project X onto the block-diagonal algebra of ref's eigenspaces.
inline HermitianOperator pinch(const HermitianOperator& x, const HermitianOperator& ref) {
    if (x.dim() != ref.dim()) throw InvalidInput("pinch: dimension mismatch");
    const SpectralDecomposition es = spectral_decompose(ref);
    const Matrix rotated = es.eigenvectors.adjoint() * x.entries() * es.eigenvectors;
    Matrix blocks = Matrix::Zero(x.dim(), x.dim());
    for (const auto& [b, e] : eigenvalue_clusters(es.eigenvalues))
        blocks.block(b, b, e - b, e - b) = rotated.block(b, b, e - b, e - b);
    Matrix out = es.eigenvectors * blocks * es.eigenvectors.adjoint();
    out = 0.5 * (out + out.adjoint().eval());
    return HermitianOperator(std::move(out), x.factors());
}

inline double trace_norm(const HermitianOperator& a) {
    return spectral_decompose(a).eigenvalues.cwiseAbs().sum();
}

inline int spec_count(const HermitianOperator& a) {
    return static_cast<int>(eigenvalue_clusters(spectral_decompose(a).eigenvalues).size());
}

inline double min_eigenvalue(const HermitianOperator& a) {
    return spectral_decompose(a).eigenvalues.minCoeff();
}

inline double max_eigenvalue(const HermitianOperator& a) {
    return spectral_decompose(a).eigenvalues.maxCoeff();
}

// Isometry onto the support of a PSD operator (eigenvalues above the cutoff).
inline Matrix support_basis(const HermitianOperator& a) {
    const SpectralDecomposition es = spectral_decompose(a);
    const double cutoff = support_cutoff(es.eigenvalues);
    std::vector<int> cols;
    for (int i = 0; i < es.eigenvalues.size(); ++i)
        if (es.eigenvalues[i] > cutoff) cols.push_back(i);
    Matrix basis(a.dim(), cols.size());
    for (size_t k = 0; k < cols.size(); ++k) basis.col(k) = es.eigenvectors.col(cols[k]);
    return basis;
}

inline Matrix support_projector(const HermitianOperator& a) {
    const Matrix v = support_basis(a);
    return v * v.adjoint();
}

inline double real_inner(const Matrix& a, const Matrix& b) {
    return (a.adjoint() * b).trace().real();
}

}  // namespace rdl
