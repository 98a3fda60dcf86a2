#include "qedvar/modes.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "qedvar/error.hpp"

namespace qedvar {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double pole_threshold = 1e-14;
constexpr double pole_merge_tolerance = 1e-12;
constexpr double decoupled_threshold = 1e-12;

// Residual without the pole guard; only called strictly inside an inter-pole interval.
double raw_residual(const CavityGeometry& c, double w) {
    const double a = w * c.emitter_position;
    const double b = w * (c.length - c.emitter_position);
    return std::cos(a) / std::sin(a) + std::cos(b) / std::sin(b) + c.coupling / w;
}

// The residual decreases strictly from +inf to -inf on (lo, hi); bisect to full precision.
double bisect_root(const CavityGeometry& c, double lo, double hi) {
    double a = lo;
    double b = hi;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = std::midpoint(a, b);
        if (mid <= a || mid >= b) break;
        if (raw_residual(c, mid) > 0.0)
            a = mid;
        else
            b = mid;
    }
    if (a <= lo) return b;
    if (b >= hi) return a;
    return std::abs(raw_residual(c, a)) < std::abs(raw_residual(c, b)) ? a : b;
}

int nearest_bare_index(const CavityGeometry& c, double w) {
    return static_cast<int>(std::lround(w * c.length / pi));
}

InteractingModeSet::Mode make_decoupled(const CavityGeometry& c, int n) {
    InteractingModeSet::Mode m;
    m.omega = bare_frequency(c, n);
    m.bare_omega = m.omega;
    m.norm = std::sqrt(2.0 / c.length);
    m.ratio = 0.0;
    m.decoupled = true;
    return m;
}

InteractingModeSet::Mode make_coupled(const CavityGeometry& c, double w, int n) {
    const double s_left = std::sin(w * c.emitter_position);
    const double s_right = std::sin(w * (c.length - c.emitter_position));
    const double ratio = s_right == 0.0 ? 0.0 : s_left / s_right;
    if (std::abs(s_left) < decoupled_threshold * std::max(1.0, std::abs(ratio)))
        return make_decoupled(c, n);
    if (std::abs(s_right) < pole_threshold)
        throw Error(ErrorKind::degenerate,
                    "mode " + std::to_string(n) + ": sin(w (L - d)) vanishes at a coupled root (degenerate geometry)");
    InteractingModeSet::Mode m;
    m.omega = w;
    m.bare_omega = bare_frequency(c, n);
    m.ratio = ratio;
    m.norm = profile_normalization(c, w);
    return m;
}

struct Pole {
    double omega;
    bool coincident;
};

std::vector<Pole> merged_poles(const CavityGeometry& c, double bound) {
    std::vector<double> raw;
    const double left = c.emitter_position;
    const double right = c.length - c.emitter_position;
    for (int k = 1; k * pi / left < bound; ++k) raw.push_back(k * pi / left);
    for (int k = 1; k * pi / right < bound; ++k) raw.push_back(k * pi / right);
    std::sort(raw.begin(), raw.end());

    std::vector<Pole> poles;
    for (double p : raw) {
        if (!poles.empty() && p - poles.back().omega <= pole_merge_tolerance * p) {
            poles.back().coincident = true;
            continue;
        }
        poles.push_back({p, false});
    }
    return poles;
}

}  // namespace

CavityGeometry CavityGeometry::from_physical(double length, double position, double area, double charge,
                                             double mass) {
    if (!(area > 0.0)) throw Error(ErrorKind::invalid_input, "cavity area must be positive");
    if (!(mass > 0.0)) throw Error(ErrorKind::invalid_input, "mass must be positive");
    return CavityGeometry{length, position, charge * charge / (mass * area)};
}

void CavityGeometry::validate() const {
    if (!(length > 0.0) || !std::isfinite(length))
        throw Error(ErrorKind::invalid_input, "cavity length must be positive");
    if (!(emitter_position > 0.0 && emitter_position < length))
        throw Error(ErrorKind::invalid_input, "emitter position must satisfy 0 < d < L");
    if (!(coupling >= 0.0) || !std::isfinite(coupling))
        throw Error(ErrorKind::invalid_input, "coupling lambda must be finite and non-negative");
}

double bare_frequency(const CavityGeometry& cavity, int n) { return n * pi / cavity.length; }

double bare_profile(const CavityGeometry& cavity, int n, double z) {
    return std::sqrt(2.0 / cavity.length) * std::sin(n * pi * z / cavity.length);
}

std::optional<double> mode_residual(const CavityGeometry& cavity, double omega) {
    const double a = omega * cavity.emitter_position;
    const double b = omega * (cavity.length - cavity.emitter_position);
    const double sa = std::sin(a);
    const double sb = std::sin(b);
    if (std::abs(sa) < pole_threshold || std::abs(sb) < pole_threshold) return std::nullopt;
    return std::cos(a) / sa + std::cos(b) / sb + cavity.coupling / omega;
}

double profile_normalization(const CavityGeometry& cavity, double omega) {
    const double d = cavity.emitter_position;
    const double rest = cavity.length - d;
    const double ratio = std::sin(omega * d) / std::sin(omega * rest);
    const double left = 0.5 * d - std::sin(2.0 * omega * d) / (4.0 * omega);
    const double right = 0.5 * rest - std::sin(2.0 * omega * rest) / (4.0 * omega);
    return 1.0 / std::sqrt(left + ratio * ratio * right);
}

double printed_normalization(const CavityGeometry& cavity, double omega) {
    const double d = cavity.emitter_position;
    const double l = cavity.length;
    const double ratio = std::sin(omega * d) / std::sin(omega * (l - d));
    return 2.0 / std::sqrt((omega * l - std::sin(omega * l)) / omega * (1.0 + ratio * ratio));
}

InteractingModeSet::InteractingModeSet(CavityGeometry cavity, std::vector<Mode> modes)
    : cavity_(cavity), modes_(std::move(modes)) {}

double InteractingModeSet::profile(std::size_t i, double z) const {
    const Mode& m = modes_.at(i);
    if (m.decoupled) return m.norm * std::sin(m.omega * z);
    if (z <= cavity_.emitter_position) return m.norm * std::sin(m.omega * z);
    return m.norm * m.ratio * std::sin(m.omega * (cavity_.length - z));
}

double InteractingModeSet::profile_at_emitter(std::size_t i) const {
    const Mode& m = modes_.at(i);
    if (m.decoupled) return 0.0;
    return m.norm * std::sin(m.omega * cavity_.emitter_position);
}

InteractingModeSet InteractingModeSet::truncated(std::size_t count) const {
    if (count > modes_.size()) throw Error(ErrorKind::invalid_input, "cannot truncate mode set upwards");
    return InteractingModeSet(cavity_, std::vector<Mode>(modes_.begin(), modes_.begin() + static_cast<long>(count)));
}

InteractingModeSet solve_frequencies(const CavityGeometry& cavity, std::size_t count) {
    cavity.validate();
    if (count == 0) throw Error(ErrorKind::invalid_input, "mode count must be at least 1");

    std::vector<InteractingModeSet::Mode> modes;
    modes.reserve(count);

    if (cavity.coupling == 0.0) {
        for (std::size_t i = 0; i < count; ++i) {
            const int n = static_cast<int>(i) + 1;
            const double w = bare_frequency(cavity, n);
            if (std::abs(std::sin(w * cavity.emitter_position)) < decoupled_threshold) {
                modes.push_back(make_decoupled(cavity, n));
                continue;
            }
            InteractingModeSet::Mode m;
            m.omega = w;
            m.bare_omega = w;
            m.norm = std::sqrt(2.0 / cavity.length);
            m.ratio = (n % 2 == 1) ? 1.0 : -1.0;
            modes.push_back(m);
        }
        return InteractingModeSet(cavity, std::move(modes));
    }

    double bound = (static_cast<double>(count) + 2.0) * pi / cavity.length;
    for (int attempt = 0; attempt < 8; ++attempt, bound *= 2.0) {
        modes.clear();
        double lo = 0.0;
        for (const Pole& pole : merged_poles(cavity, bound)) {
            if (modes.size() >= count) break;
            const int n = static_cast<int>(modes.size()) + 1;
            modes.push_back(make_coupled(cavity, bisect_root(cavity, lo, pole.omega), n));
            if (pole.coincident && modes.size() < count) {
                const int nb = nearest_bare_index(cavity, pole.omega);
                modes.push_back(make_decoupled(cavity, nb));
            }
            lo = pole.omega;
        }
        if (modes.size() >= count) {
            modes.resize(count);
            return InteractingModeSet(cavity, std::move(modes));
        }
    }
    throw Error(ErrorKind::convergence,
                "found only " + std::to_string(modes.size()) + " of " + std::to_string(count) +
                    " interacting frequencies below the pole bound");
}

double verify_orthonormality(const InteractingModeSet& modes, std::size_t count) {
    using Rule = boost::math::quadrature::gauss<double, 64>;
    if (count == 0 || count > modes.size()) count = modes.size();
    const auto& c = modes.cavity();

    std::vector<double> nodes;
    std::vector<double> weights;
    const auto& abscissa = Rule::abscissa();
    const auto& rule_weights = Rule::weights();
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
        nodes.push_back(abscissa[i]);
        weights.push_back(rule_weights[i]);
        if (abscissa[i] != 0.0) {
            nodes.push_back(-abscissa[i]);
            weights.push_back(rule_weights[i]);
        }
    }

    const double half_wave = pi / modes.omega(count - 1);
    auto gram = [&](int refine) {
        Eigen::MatrixXd g = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(count));
        Eigen::VectorXd values(static_cast<Eigen::Index>(count));
        const std::pair<double, double> pieces[] = {{0.0, c.emitter_position}, {c.emitter_position, c.length}};
        for (auto [a, b] : pieces) {
            const int panels = refine * std::max(1, static_cast<int>(std::ceil((b - a) / half_wave)));
            const double h = (b - a) / panels;
            for (int p = 0; p < panels; ++p) {
                const double mid = a + (p + 0.5) * h;
                for (std::size_t q = 0; q < nodes.size(); ++q) {
                    const double z = mid + 0.5 * h * nodes[q];
                    for (std::size_t i = 0; i < count; ++i) values(static_cast<Eigen::Index>(i)) = modes.profile(i, z);
                    g.noalias() += (0.5 * h * weights[q]) * values * values.transpose();
                }
            }
        }
        return g;
    };

    Eigen::MatrixXd previous = gram(1);
    for (int refine = 2; refine <= 64; refine *= 2) {
        Eigen::MatrixXd next = gram(refine);
        const double change = (next - previous).cwiseAbs().maxCoeff();
        previous = std::move(next);
        if (change < 1e-10) break;
    }
    const auto n = static_cast<Eigen::Index>(count);
    return (previous - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace qedvar
