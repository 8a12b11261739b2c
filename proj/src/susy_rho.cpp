#include "vcs/susy_rho.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vcs/errors.hpp"
#include "vcs/families.hpp"

namespace vcs::rho {

namespace {

using std::numbers::pi;

constexpr double kNodeTolerance = 1e-10;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

double half_shift(const RhoParams& p) { return (p.epsilon + 3.0) / 2.0; }

}  // namespace

void RhoParams::validate() const {
    if (!(gamma >= 0.0)) throw ParameterError("RHO parameters: gamma must be >= 0");
    if (!(epsilon > -1.0)) throw ParameterError("RHO parameters: epsilon must be > -1");
}

std::vector<std::string> RhoParams::positivity_violations() const {
    std::vector<std::string> out;
    double ratio = 0.0;
    try {
        ratio = math::gamma_signed(-gamma - 0.5) / math::gamma_signed(epsilon / 2.0 - gamma - 1.0);
    } catch (const PoleError&) {
        out.push_back("Gamma(-gamma-1/2)/Gamma(epsilon/2-gamma-1) is not a finite positive number");
        return out;
    }
    if (!(ratio > 0.0)) out.push_back("Gamma(-gamma-1/2)/Gamma(epsilon/2-gamma-1) must be positive");
    const double bound = ratio * math::gamma_fn((1.0 + epsilon) / 2.0) / math::gamma_fn(2.5 + gamma);
    if (!(std::abs(beta) < bound)) {
        std::ostringstream os;
        os << "|beta| must be below " << bound;
        out.push_back(os.str());
    }
    return out;
}

double rho_energy(const RhoParams& p, std::size_t n, Branch b) {
    p.validate();
    const double nn = static_cast<double>(n);
    if (b == Branch::Plus) return 2.0 * nn + 1.0 + p.epsilon;
    return n == 0 ? 0.0 : 2.0 * (nn - 1.0) + 1.0 + p.epsilon;
}

Moments rho_moments(const RhoParams& p, std::size_t n) {
    p.validate();
    const double two_n = std::ldexp(1.0, static_cast<int>(n));
    return {two_n * std::tgamma(static_cast<double>(n) + 1.0),
            two_n * math::pochhammer(half_shift(p), static_cast<unsigned>(n))};
}

double rho_normalization(const RhoParams& p, double r1, double r2, const math::SpecialFunctionConfig& cfg) {
    p.validate();
    return std::exp(r1 * r1 / 2.0) + math::kummer_1f1(1.0, half_shift(p), r2 * r2 / 2.0, cfg);
}

VcsFamily rho_family(const RhoParams& p) {
    p.validate();
    const double b = half_shift(p);
    // log rho via lgamma so that large n stays finite
    auto plus = [](std::size_t n) {
        return std::exp(static_cast<double>(n) * std::log(2.0) + std::lgamma(static_cast<double>(n) + 1.0));
    };
    auto minus = [b](std::size_t n) {
        return std::exp(static_cast<double>(n) * std::log(2.0) + std::lgamma(static_cast<double>(n) + b) -
                        std::lgamma(b));
    };
    return families::diagonal_family("rho", plus, minus,
                                     [p](double r1, double r2) { return rho_normalization(p, r1, r2); });
}

VcsState build_rho_cs(const RhoParams& p, Complex z1, Complex z2, std::size_t j, const FockTruncation& trunc) {
    const VcsFamily f = rho_family(p);
    FockTruncation t = trunc;
    t.n_components = 2;
    return build_vcs(f.moments, families::diagonal_label(z1, z2), j, t, Ordering::RZ,
                     rho_normalization(p, std::abs(z1), std::abs(z2)));
}

Potentials rho_potentials(const RhoParams& p, double x, const math::SpecialFunctionConfig& cfg) {
    p.validate();
    const auto bad = p.positivity_violations();
    if (!bad.empty()) throw ParameterError("RHO potentials: " + bad.front());
    if (!(x > 0.0)) throw DomainError("rho_potentials: x must be positive");

    const double g = p.gamma;
    const double e = p.epsilon;
    const double a1 = (1.0 - e) / 2.0;
    const double b1 = -g - 0.5;
    const double a2 = 2.0 + g - e / 2.0;
    const double b2 = 2.5 + g;
    const double y = -x * x;
    const double pw = 2.0 * g + 3.0;

    const double f1 = math::kummer_1f1(a1, b1, y, cfg);
    const double f2 = math::kummer_1f1(a2, b2, y, cfg);
    // d/dx 1F1(a; b; -x^2) = -2x (a/b) 1F1(a+1; b+1; -x^2)
    const double df1 = -2.0 * x * (a1 / b1) * math::kummer_1f1(a1 + 1.0, b1 + 1.0, y, cfg);
    const double df2 = -2.0 * x * (a2 / b2) * math::kummer_1f1(a2 + 1.0, b2 + 1.0, y, cfg);

    Potentials out;
    out.u = f1 + p.beta * std::pow(x, pw) * f2;
    out.du = df1 + p.beta * (pw * std::pow(x, pw - 1.0) * f2 + std::pow(x, pw) * df2);
    if (std::abs(out.u) < kNodeTolerance) {
        std::ostringstream os;
        os << "rho_potentials: u(" << x << ") = " << out.u << " vanishes; V_- is singular there";
        throw DomainError(os.str());
    }
    const double q = out.du / out.u;
    out.v_plus = x * x / 2.0 + (g + 1.0) * (g + 1.0) / (2.0 * x * x) + e - g - 1.5;
    out.v_minus = x * x / 2.0 + g * (g + 2.0) / (2.0 * x * x) - e - g - 0.5 + q * (2.0 * x - 2.0 * (g + 1.0) / x + q);
    return out;
}

std::pair<audit::RadialMeasure, audit::RadialMeasure> rho_measures(const RhoParams& p) {
    p.validate();
    const double b = half_shift(p);
    const double eps = p.epsilon;

    audit::RadialMeasure printed;
    printed.name = "paper";
    printed.dims = 2;
    const double k = std::pow(2.0, b) * math::gamma_fn(b);
    printed.density = [k](std::span<const double> r) {
        return r[0] * r[1] / (pi * pi * k) * std::exp(-(r[0] * r[0] + r[1] * r[1]) / 2.0);
    };
    printed.includes_normalization = true;
    printed.angular_factor = 4.0 * pi * pi;
    printed.t_scales = {2.0, 2.0};

    audit::RadialMeasure corrected = printed;
    corrected.name = "corrected";
    const double c = std::pow(2.0, (eps + 1.0) / 2.0) * math::gamma_fn(b);
    corrected.density = [c, eps](std::span<const double> r) {
        const double wp = r[0] * std::exp(-r[0] * r[0] / 2.0);
        const double wm = std::pow(r[1], eps + 2.0) * std::exp(-r[1] * r[1] / 2.0) / c;
        return wp * wm / (4.0 * pi * pi);
    };
    return {printed, corrected};
}

double paper_measure_level0_defect(double epsilon) {
    const double b = (epsilon + 3.0) / 2.0;
    return std::abs(4.0 / (std::pow(2.0, b) * math::gamma_fn(b)) - 1.0);
}

VcsFamily broken_susy_family(std::function<double(std::size_t)> rho) {
    return families::diagonal_family("broken-susy", rho, rho, {});
}

VcsState broken_susy_cs(const std::function<double(std::size_t)>& rho, Complex z1, Complex z2, std::size_t j,
                        const FockTruncation& trunc) {
    const VcsFamily f = broken_susy_family(rho);
    FockTruncation t = trunc;
    t.n_components = 2;
    return build_vcs(f.moments, families::diagonal_label(z1, z2), j, t, Ordering::RZ);
}

ComplexMatrix SU2Element::matrix() const {
    ComplexMatrix u(2, 2);
    u << a, -std::conj(b), b, std::conj(a);
    return u;
}

void SU2Element::validate() const {
    const ComplexMatrix u = matrix();
    const double unit = (u.adjoint() * u - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff();
    const double det = std::abs(u.determinant() - 1.0);
    if (unit > 1e-12 || det > 1e-12) {
        std::ostringstream os;
        os << "SU2Element: not special unitary (|U^dagger U - I| = " << unit << ", |det U - 1| = " << det << ")";
        throw PreconditionError(os.str());
    }
}

SU2Element haar_su2(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double q[4];
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& v : q) {
            v = gauss(rng);
            norm += v * v;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    return {Complex(q[0] / norm, q[1] / norm), Complex(q[2] / norm, q[3] / norm)};
}

VcsState su2_rotated_cs(const std::function<double(std::size_t)>& rho, Complex z1, Complex z2,
                        const SU2Element& u, std::size_t j, const FockTruncation& trunc) {
    u.validate();
    const VcsFamily f = broken_susy_family(rho);
    const ComplexMatrix um = u.matrix();
    FockTruncation t = trunc;
    t.n_components = 2;
    return build_vcs(f.moments, um * families::diagonal_label(z1, z2) * um.adjoint(), j, t, Ordering::RZ);
}

MonteCarloReport haar_resolution_audit(std::size_t samples, std::size_t max_level, std::uint64_t seed,
                                       std::size_t streams, Execution exec) {
    if (samples == 0 || streams == 0) throw DomainError("haar_resolution_audit: need samples and streams");
    const std::size_t levels = max_level + 1;
    const std::size_t nblocks = levels * levels;
    // per stream: sums of each real and imaginary entry and of their squares
    std::vector<Eigen::MatrixXd> sums(streams, Eigen::MatrixXd::Zero(8, idx(nblocks)));
    std::vector<Eigen::MatrixXd> squares(streams, Eigen::MatrixXd::Zero(8, idx(nblocks)));
    std::vector<double> inv_sqrt_fact(levels);
    for (std::size_t n = 0; n < levels; ++n) inv_sqrt_fact[n] = 1.0 / std::sqrt(std::tgamma(n + 1.0));

    auto run_stream = [&](std::size_t s) {
        std::seed_seq seq{static_cast<std::uint64_t>(seed), static_cast<std::uint64_t>(s)};
        std::mt19937_64 rng(seq);
        std::exponential_distribution<double> expo(1.0);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
        const std::size_t count = samples / streams + (s < samples % streams ? 1 : 0);
        std::vector<ComplexMatrix> powers(levels);
        for (std::size_t i = 0; i < count; ++i) {
            const double r = std::sqrt(expo(rng));
            const Complex z = std::polar(r, angle(rng));
            const ComplexMatrix u = haar_su2(rng).matrix();
            const ComplexMatrix zr = u * families::diagonal_label(z, std::conj(z)) * u.adjoint();
            powers[0] = ComplexMatrix::Identity(2, 2);
            for (std::size_t n = 1; n < levels; ++n) powers[n] = powers[n - 1] * zr;
            for (std::size_t n = 0; n < levels; ++n)
                for (std::size_t l = 0; l < levels; ++l) {
                    const ComplexMatrix blk = powers[n] * powers[l].adjoint() * (inv_sqrt_fact[n] * inv_sqrt_fact[l]);
                    const Eigen::Index col = idx(n * levels + l);
                    for (Eigen::Index e = 0; e < 4; ++e) {
                        const Complex v = blk(e / 2, e % 2);
                        sums[s](2 * e, col) += v.real();
                        sums[s](2 * e + 1, col) += v.imag();
                        squares[s](2 * e, col) += v.real() * v.real();
                        squares[s](2 * e + 1, col) += v.imag() * v.imag();
                    }
                }
        }
    };

    const auto ns = static_cast<long>(streams);
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(static)
        for (long s = 0; s < ns; ++s) run_stream(static_cast<std::size_t>(s));
    } else {
        for (long s = 0; s < ns; ++s) run_stream(static_cast<std::size_t>(s));
    }

    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(8, idx(nblocks));
    Eigen::MatrixXd total_sq = Eigen::MatrixXd::Zero(8, idx(nblocks));
    for (std::size_t s = 0; s < streams; ++s) {
        total += sums[s];
        total_sq += squares[s];
    }
    const double nsamp = static_cast<double>(samples);
    MonteCarloReport rep;
    rep.samples = samples;
    rep.streams = streams;
    rep.seed = seed;
    rep.max_level = max_level;
    for (std::size_t n = 0; n < levels; ++n)
        for (std::size_t l = 0; l < levels; ++l) {
            const Eigen::Index col = idx(n * levels + l);
            ComplexMatrix blk(2, 2);
            for (Eigen::Index e = 0; e < 4; ++e) {
                blk(e / 2, e % 2) = Complex(total(2 * e, col), total(2 * e + 1, col)) / nsamp;
                for (Eigen::Index part = 0; part < 2; ++part) {
                    const double mean = total(2 * e + part, col) / nsamp;
                    const double var = std::max(0.0, total_sq(2 * e + part, col) / nsamp - mean * mean);
                    rep.standard_error = std::max(rep.standard_error, std::sqrt(var / nsamp));
                }
            }
            const ComplexMatrix target =
                n == l ? ComplexMatrix::Identity(2, 2) : ComplexMatrix::Zero(2, 2).eval();
            rep.deviation = std::max(rep.deviation, (blk - target).cwiseAbs().maxCoeff());
            rep.blocks.push_back(blk);
        }
    return rep;
}

}  // namespace vcs::rho
