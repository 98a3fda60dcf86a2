#include "qedvar/matter.hpp"

#include <cmath>
#include <string>

#include "qedvar/error.hpp"

namespace qedvar {

void EmitterSpec::validate() const {
    if (n_levels() < 2)
        throw Error(ErrorKind::invalid_input, "emitter needs at least 2 levels, got " + std::to_string(n_levels()));
    if (hopping == 0.0 || !std::isfinite(hopping))
        throw Error(ErrorKind::invalid_input, "hopping must be finite and nonzero");
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw Error(ErrorKind::invalid_input, "mass must be positive");
    if (!std::isfinite(charge))
        throw Error(ErrorKind::invalid_input, "charge must be finite");
    if (site_length && !(*site_length > 0.0))
        throw Error(ErrorKind::invalid_input, "site length must be positive");
    for (double v : site_potentials)
        if (!std::isfinite(v)) throw Error(ErrorKind::invalid_input, "site potentials must be finite");
}

Eigen::MatrixXd build_matter_hamiltonian(const EmitterSpec& spec) {
    spec.validate();
    const int n = spec.n_levels();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) h(i, i) = spec.site_potentials[static_cast<std::size_t>(i)];
    for (int i = 0; i + 1 < n; ++i) {
        h(i, i + 1) = spec.hopping;
        h(i + 1, i) = spec.hopping;
    }
    return h;
}

Eigenbasis diagonalize_matter(const Eigen::MatrixXd& hamiltonian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorKind::convergence, "matter eigensolver did not converge");

    Eigenbasis out{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index k = 0; k < out.vectors.cols(); ++k) {
        Eigen::Index imax = 0;
        out.vectors.col(k).cwiseAbs().maxCoeff(&imax);
        if (out.vectors(imax, k) < 0.0) out.vectors.col(k) *= -1.0;
    }
    return out;
}

Eigen::MatrixXcd momentum_matrix(double site_length, const Eigenbasis& basis) {
    const Eigen::Index n = basis.vectors.rows();
    // Real antisymmetric part K; p_site = (-i/R) K.
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        k(i, i + 1) = 1.0;
        k(i + 1, i) = -1.0;
    }
    Eigen::MatrixXd k_eig = basis.vectors.transpose() * k * basis.vectors;
    // Exact zeros on the diagonal; rounding would otherwise leave ~1e-17.
    k_eig.diagonal().setZero();
    return std::complex<double>(0.0, -1.0 / site_length) * k_eig.cast<std::complex<double>>();
}

double trk_sum(const MatterEigensystem& system, int ground_index) {
    const auto& e = system.energies;
    const double scale = e.cwiseAbs().maxCoeff();
    double sum = 0.0;
    for (int i = 0; i < system.size(); ++i) {
        if (i == ground_index) continue;
        const double gap = e(i) - e(ground_index);
        if (std::abs(gap) < 1e-10 * scale)
            throw Error(ErrorKind::degenerate,
                        "degenerate ground state: level " + std::to_string(i) + " coincides with level " +
                            std::to_string(ground_index));
        sum += std::norm(system.momentum(i, ground_index)) / gap;
    }
    return 2.0 / system.mass * sum;
}

double calibrate_site_length(const EmitterSpec& spec) {
    auto basis = diagonalize_matter(build_matter_hamiltonian(spec));
    MatterEigensystem reference{basis.energies, basis.vectors, momentum_matrix(1.0, basis), 1.0, spec.mass};
    const double trk_at_unit = trk_sum(reference);
    if (!(trk_at_unit > 0.0))
        throw Error(ErrorKind::degenerate, "TRK sum is not positive at the reference site length");
    return std::sqrt(trk_at_unit);
}

MatterEigensystem solve_matter(const EmitterSpec& spec) {
    auto basis = diagonalize_matter(build_matter_hamiltonian(spec));
    const double r = spec.site_length ? *spec.site_length : calibrate_site_length(spec);
    MatterEigensystem out;
    out.momentum = momentum_matrix(r, basis);
    out.energies = std::move(basis.energies);
    out.eigenvectors = std::move(basis.vectors);
    out.site_length = r;
    out.mass = spec.mass;
    return out;
}

}  // namespace qedvar
