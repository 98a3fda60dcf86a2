#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "qedvar/error.hpp"
#include "qedvar/oracle.hpp"

namespace qedvar {

namespace {

// Uniform in [-1, 1) from raw 64-bit draws; independent of the standard
// library's distribution implementations.
double uniform_signed(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

class KrylovBasis {
public:
    KrylovBasis(std::size_t dimension, std::size_t capacity, const LinearOperator& op)
        : v_(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(capacity)),
          w_(static_cast<Eigen::Index>(dimension), static_cast<Eigen::Index>(capacity)),
          op_(op) {}

    Eigen::Index size() const noexcept { return m_; }
    Eigen::Index capacity() const noexcept { return v_.cols(); }
    int applications() const noexcept { return applications_; }
    auto basis() const { return v_.leftCols(m_); }
    auto image() const { return w_.leftCols(m_); }

    // Orthogonalizes `candidate` against the basis (two passes) and appends it
    // with its image unless it is numerically dependent.
    bool append(Eigen::VectorXd candidate) {
        if (m_ >= capacity()) return false;
        const double original = candidate.norm();
        if (!(original > 0.0)) return false;
        for (int pass = 0; pass < 2; ++pass) {
            if (m_ > 0) candidate.noalias() -= basis() * (basis().transpose() * candidate);
        }
        const double remaining = candidate.norm();
        if (remaining <= 1e-8 * original) return false;
        v_.col(m_) = candidate / remaining;
        Eigen::VectorXd image(v_.rows());
        op_(std::span<const double>(v_.col(m_).data(), static_cast<std::size_t>(v_.rows())),
            std::span<double>(image.data(), static_cast<std::size_t>(image.size())));
        w_.col(m_) = image;
        ++m_;
        ++applications_;
        return true;
    }

    // Replaces the basis by the Ritz vectors V Y[:, :keep]; images follow linearly.
    void compress(const Eigen::MatrixXd& ritz_coefficients, Eigen::Index keep) {
        Eigen::MatrixXd vk = basis() * ritz_coefficients.leftCols(keep);
        Eigen::MatrixXd wk = image() * ritz_coefficients.leftCols(keep);
        v_.leftCols(keep) = vk;
        w_.leftCols(keep) = wk;
        m_ = keep;
    }

private:
    Eigen::MatrixXd v_;
    Eigen::MatrixXd w_;
    Eigen::Index m_ = 0;
    int applications_ = 0;
    const LinearOperator& op_;
};

}  // namespace

KrylovResult lowest_eigenvalues(std::size_t dimension, const LinearOperator& op, std::size_t k,
                                const KrylovOptions& options) {
    if (k == 0) throw Error(ErrorKind::invalid_input, "need at least one eigenvalue");
    if (k > dimension)
        throw Error(ErrorKind::invalid_input, "requested " + std::to_string(k) + " eigenvalues of a " +
                                                  std::to_string(dimension) + "-dimensional operator");

    const std::size_t block = std::min(dimension, k + 3);
    std::size_t capacity = options.max_basis > 0 ? static_cast<std::size_t>(options.max_basis)
                                                 : (dimension > 200'000 ? std::max<std::size_t>(3 * block, 24)
                                                                        : std::max<std::size_t>(4 * block, 40));
    capacity = std::min(dimension, std::max(capacity, 2 * block));

    std::mt19937_64 rng(options.seed);
    auto random_vector = [&] {
        Eigen::VectorXd r(static_cast<Eigen::Index>(dimension));
        for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = uniform_signed(rng);
        return r;
    };

    KrylovBasis space(dimension, capacity, op);
    for (std::size_t i = 0; i < block; ++i) space.append(random_vector());

    const auto kk = static_cast<Eigen::Index>(k);
    KrylovResult result;
    for (int iter = 1;; ++iter) {
        const Eigen::Index m = space.size();
        Eigen::MatrixXd projected = space.basis().transpose() * space.image();
        projected = 0.5 * (projected + projected.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> rr(projected);
        if (rr.info() != Eigen::Success) throw Error(ErrorKind::convergence, "Rayleigh-Ritz eigensolve failed");

        const Eigen::Index nb = std::min<Eigen::Index>(static_cast<Eigen::Index>(block), m);
        const Eigen::VectorXd theta = rr.eigenvalues().head(nb);
        const Eigen::MatrixXd y = rr.eigenvectors().leftCols(nb);
        Eigen::MatrixXd ritz = space.basis() * y;
        Eigen::MatrixXd residual = space.image() * y - ritz * theta.asDiagonal();

        Eigen::VectorXd norms = residual.colwise().norm().transpose();
        bool converged = m >= kk;
        for (Eigen::Index j = 0; j < std::min(kk, nb); ++j)
            if (norms(j) > options.tolerance * std::max(std::abs(theta(j)), 1.0)) converged = false;
        if (m == static_cast<Eigen::Index>(dimension)) converged = true;

        if (converged) {
            result.values = theta.head(kk);
            result.residuals = norms.head(kk);
            if (options.want_vectors) result.vectors = ritz.leftCols(kk);
            result.iterations = iter;
            result.applications = space.applications();
            return result;
        }
        if (iter >= options.max_iterations) {
            std::ostringstream msg;
            msg << "Krylov eigensolver did not converge in " << iter << " iterations; residuals:";
            for (Eigen::Index j = 0; j < std::min(kk, nb); ++j) msg << ' ' << norms(j);
            throw Error(ErrorKind::convergence, msg.str());
        }

        std::vector<Eigen::Index> pending;
        for (Eigen::Index j = 0; j < nb; ++j)
            if (norms(j) > options.tolerance * std::max(std::abs(theta(j)), 1.0)) pending.push_back(j);

        if (m + static_cast<Eigen::Index>(pending.size()) > space.capacity()) {
            const Eigen::Index keep =
                std::max(nb, std::min<Eigen::Index>(m, space.capacity() - static_cast<Eigen::Index>(block)));
            space.compress(rr.eigenvectors(), keep);
        }
        bool grew = false;
        for (Eigen::Index j : pending) grew = space.append(residual.col(j)) || grew;
        if (!grew) space.append(random_vector());
    }
}

KrylovResult lowest_eigenvalues(const OracleHamiltonian& hamiltonian, std::size_t k, const KrylovOptions& options) {
    LinearOperator op = [&hamiltonian](std::span<const double> x, std::span<double> y) { hamiltonian.apply(x, y); };
    return lowest_eigenvalues(hamiltonian.dimension(), op, k, options);
}

}  // namespace qedvar
