#include <cmath>
#include <complex>

#include "qedvar/error.hpp"
#include "qedvar/oracle.hpp"
#include "qedvar/parallel.hpp"

namespace qedvar {

OracleHamiltonian::OracleHamiltonian(std::shared_ptr<const FockBasis> basis, const MatterEigensystem& matter,
                                     const CavityGeometry& cavity, unsigned threads)
    : basis_(std::move(basis)), cavity_(cavity), threads_(std::max(1u, threads)) {
    cavity_.validate();
    if (!basis_) throw Error(ErrorKind::invalid_input, "oracle needs a Fock basis");
    if (basis_->n_matter() != matter.size())
        throw Error(ErrorKind::invalid_input, "Fock basis matter dimension does not match the emitter");

    n_matter_ = matter.size();
    energies_ = matter.energies;
    // p is purely imaginary in this model; kappa = i p is real antisymmetric.
    const Eigen::MatrixXcd ip = std::complex<double>(0.0, 1.0) * matter.momentum;
    const double scale = std::max(1.0, ip.cwiseAbs().maxCoeff());
    if (ip.imag().cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(ErrorKind::invalid_input, "oracle requires a purely imaginary momentum matrix");
    current_ = ip.real();

    ap_coupling_ = std::sqrt(cavity_.coupling / matter.mass);
    a2_coupling_ = 0.5 * cavity_.coupling;

    double u2 = 0.0;
    for (int i = 0; i < basis_->n_modes(); ++i) {
        const int n = i + 1;
        const double w = bare_frequency(cavity_, n);
        const double u = bare_profile(cavity_, n, cavity_.emitter_position) / std::sqrt(2.0 * w);
        bare_omega_.push_back(w);
        amplitude_.push_back(u);
        u2 += u * u;
    }
    a2_constant_ = a2_coupling_ * u2;

    photon_energy_.resize(basis_->photon_count());
    for (std::size_t j = 0; j < basis_->photon_count(); ++j) {
        double e = 0.0;
        for (const auto& occ : basis_->occupation(j)) e += occ.count * bare_omega_[occ.mode];
        photon_energy_[j] = e;
    }
}

double OracleHamiltonian::diagonal(std::size_t index) const {
    const auto na = static_cast<std::size_t>(n_matter_);
    double occupied = 0.0;
    for (const auto& occ : basis_->occupation(index / na)) occupied += occ.count * amplitude_[occ.mode] * amplitude_[occ.mode];
    return energies_(static_cast<Eigen::Index>(index % na)) + photon_energy_[index / na] + a2_constant_ +
           2.0 * a2_coupling_ * occupied;
}

bool OracleHamiltonian::odd_phase(std::size_t index) const {
    return basis_->total_photons(index / static_cast<std::size_t>(n_matter_)) % 2 == 1;
}

void OracleHamiltonian::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t dim = dimension();
    if (x.size() != dim || y.size() != dim)
        throw Error(ErrorKind::invalid_input, "vector dimension does not match the Fock basis");
    const auto na = static_cast<std::size_t>(n_matter_);
    const auto modes = static_cast<std::uint32_t>(basis_->n_modes());
    const FockBasis& basis = *basis_;

    // Row j of B v: sum_m u_m sqrt(n_m + 1) v[j + e_m].
    auto gather_lower = [&](std::size_t j, const double* v, double* out) {
        const auto occ = basis.occupation(j);
        std::size_t k = 0;
        for (std::uint32_t m = 0; m < modes; ++m) {
            double n = 0.0;
            if (k < occ.size() && occ[k].mode == m) n = occ[k++].count;
            const std::int64_t t = basis.raised(j, static_cast<int>(m));
            if (t < 0) continue;
            const double factor = amplitude_[m] * std::sqrt(n + 1.0);
            const double* src = v + static_cast<std::size_t>(t) * na;
            for (std::size_t a = 0; a < na; ++a) out[a] += factor * src[a];
        }
    };
    // Row j of B^dag v: sum_m u_m sqrt(n_m) v[j - e_m].
    auto gather_raise = [&](std::size_t j, const double* v, double* out) {
        const auto occ = basis.occupation(j);
        const auto low = basis.lowered(j);
        for (std::size_t k = 0; k < occ.size(); ++k) {
            const double factor = amplitude_[occ[k].mode] * std::sqrt(static_cast<double>(occ[k].count));
            const double* src = v + static_cast<std::size_t>(low[k]) * na;
            for (std::size_t a = 0; a < na; ++a) out[a] += factor * src[a];
        }
    };

    // Each output row is written by exactly one chunk.
    std::vector<double> lowered(dim, 0.0);  // B x
    std::vector<double> raised(dim, 0.0);   // B^dag x
    parallel_for(basis.photon_count(), threads_, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            gather_lower(j, x.data(), lowered.data() + j * na);
            gather_raise(j, x.data(), raised.data() + j * na);
        }
    });

    // 2 B x + B^dag x, so that B^dag of it gives 2 B^dag B x + (B^dag)^2 x.
    std::vector<double> mixed(dim);
    for (std::size_t i = 0; i < dim; ++i) mixed[i] = 2.0 * lowered[i] + raised[i];

    parallel_for(basis.photon_count(), threads_, [&](std::size_t begin, std::size_t end) {
        std::vector<double> square(na);
        for (std::size_t j = begin; j < end; ++j) {
            // Hard-truncated X^2 = B^2 + 2 B^dag B + (B^dag)^2 + sum u^2 (constant kept on the diagonal).
            std::fill(square.begin(), square.end(), 0.0);
            gather_lower(j, lowered.data(), square.data());
            gather_raise(j, mixed.data(), square.data());

            const double* xrow = x.data() + j * na;
            const double* lrow = lowered.data() + j * na;
            const double* rrow = raised.data() + j * na;
            double* yrow = y.data() + j * na;
            const double sign = basis.total_photons(j) % 2 == 0 ? 1.0 : -1.0;
            for (std::size_t a = 0; a < na; ++a) {
                double coupled = 0.0;
                for (std::size_t b = 0; b < na; ++b)
                    coupled += current_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * (lrow[b] + rrow[b]);
                yrow[a] = (energies_(static_cast<Eigen::Index>(a)) + photon_energy_[j] + a2_constant_) * xrow[a] +
                          a2_coupling_ * square[a] + sign * ap_coupling_ * coupled;
            }
        }
    });
}

Eigen::VectorXd OracleHamiltonian::apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(x.size());
    apply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
          std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
    return y;
}

double zero_point_convention(const OracleHamiltonian& hamiltonian) {
    double sum = 0.0;
    for (double w : hamiltonian.bare_omegas()) sum += w;
    return 0.5 * sum;
}

}  // namespace qedvar
