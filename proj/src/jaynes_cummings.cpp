#include "vcs/jaynes_cummings.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vcs/errors.hpp"
#include "vcs/families.hpp"

namespace vcs::jc {

namespace {

using std::numbers::pi;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// sqrt(omega_c) a and sqrt(omega_c) a^dagger on a padded stack
Eigen::MatrixXcd lower(const JCParams& p, const Eigen::MatrixXcd& v) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(v.rows(), v.cols());
    for (Eigen::Index c = 0; c < v.rows(); ++c) {
        const double s = std::sqrt(p.branch_frequency(static_cast<std::size_t>(c)));
        for (Eigen::Index m = 0; m + 1 < v.cols(); ++m) out(c, m) = s * std::sqrt(m + 1.0) * v(c, m + 1);
    }
    return out;
}

Eigen::MatrixXcd raise(const JCParams& p, const Eigen::MatrixXcd& v) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(v.rows(), v.cols());
    for (Eigen::Index c = 0; c < v.rows(); ++c) {
        const double s = std::sqrt(p.branch_frequency(static_cast<std::size_t>(c)));
        for (Eigen::Index m = 1; m < v.cols(); ++m) out(c, m) = s * std::sqrt(static_cast<double>(m)) * v(c, m - 1);
    }
    return out;
}

Eigen::MatrixXcd number(const Eigen::MatrixXcd& v, double wc0, double wc1) {
    Eigen::MatrixXcd out = v;
    for (Eigen::Index m = 0; m < v.cols(); ++m) {
        out(0, m) *= wc0 * static_cast<double>(m);
        out(1, m) *= wc1 * static_cast<double>(m);
    }
    return out;
}

Eigen::MatrixXcd apply_q(const JCParams& p, const Eigen::MatrixXcd& v) {
    return (lower(p, v) + raise(p, v)) / std::sqrt(2.0);
}

Eigen::MatrixXcd apply_p(const JCParams& p, const Eigen::MatrixXcd& v) {
    return (lower(p, v) - raise(p, v)) / Complex(0.0, std::sqrt(2.0));
}

std::optional<double> ratio(double num, double den) {
    if (den == 0.0) return std::nullopt;
    return num / den;
}

}  // namespace

double JCParams::delta() const {
    const double q = detuning() / (2.0 * kappa);
    return q * q;
}

double JCParams::omega_plus() const { return omega + kappa * kappa / detuning(); }

double JCParams::omega_minus() const { return omega - kappa * kappa / detuning(); }

double JCParams::branch_frequency(std::size_t component) const {
    return component == 0 ? omega_plus() : omega_minus();
}

void JCParams::validate() const {
    std::ostringstream os;
    if (!(omega > 0.0)) os << "omega must be positive";
    else if (!(detuning() > 0.0)) os << "detuning omega - omega0 must be positive";
    else if (!(kappa > 0.0)) os << "kappa must be positive";
    else if (kappa / omega > 2.0 * std::sqrt(delta() + 1.0)) os << "kappa/omega exceeds 2 sqrt(delta + 1)";
    else if (!(omega_minus() > 0.0)) os << "omega_- = omega - kappa^2/Delta must be positive";
    if (!os.str().empty()) throw ParameterError("JC parameters: " + os.str());
}

BranchEnergies exact_energies(const JCParams& p, std::size_t n) {
    p.validate();
    const double d = p.delta();
    const double nn = static_cast<double>(n);
    return {p.omega * nn + p.kappa * std::sqrt(d + nn), p.omega * (nn + 1.0) - p.kappa * std::sqrt(d + nn + 1.0)};
}

BranchEnergies excitation_energies(const JCParams& p, std::size_t n) {
    p.validate();
    // kappa (r(n) - r(0)) written without cancellation
    const double d = p.delta();
    const double nn = static_cast<double>(n);
    const double up = p.kappa * nn / (std::sqrt(d + nn) + std::sqrt(d));
    const double down = p.kappa * nn / (std::sqrt(d + nn + 1.0) + std::sqrt(d + 1.0));
    return {p.omega * nn + up, p.omega * nn - down};
}

Slopes weak_coupling_slopes(const JCParams& p) {
    p.validate();
    return {p.omega_plus(), p.omega_minus()};
}

Eigen::MatrixXd build_hjc_truncated(const JCParams& p, std::size_t m) {
    if (m < 2) throw DomainError("build_hjc_truncated: need M >= 2");
    const auto dim = idx(2 * (m + 1));
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t n = 0; n <= m; ++n) {
        const double field = p.omega * (static_cast<double>(n) + 0.5);
        h(idx(2 * n), idx(2 * n)) = field + p.omega0 / 2.0;
        h(idx(2 * n + 1), idx(2 * n + 1)) = field - p.omega0 / 2.0;
        if (n < m) {
            // a^dagger sigma_- : |n, up> -> sqrt(n+1) |n+1, down>
            const double g = p.kappa * std::sqrt(static_cast<double>(n) + 1.0);
            h(idx(2 * (n + 1) + 1), idx(2 * n)) = g;
            h(idx(2 * n), idx(2 * (n + 1) + 1)) = g;
        }
    }
    return h;
}

TruncatedSpectrum truncated_spectrum(const JCParams& p, std::size_t m) {
    const Eigen::MatrixXd h = build_hjc_truncated(p, m);
    TruncatedSpectrum out;
    out.plus.push_back(h(1, 1));
    for (std::size_t n = 0; n < m; ++n) {
        const Eigen::Index up = idx(2 * n);
        const Eigen::Index down = idx(2 * (n + 1) + 1);
        Eigen::Matrix2d block;
        block << h(up, up), h(up, down), h(down, up), h(down, down);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
        out.minus.push_back(es.eigenvalues()(0));
        out.plus.push_back(es.eigenvalues()(1));
    }
    return out;
}

VcsFamily jc_family(const JCParams& p) {
    p.validate();
    const double wp = p.omega_plus();
    const double wm = p.omega_minus();
    auto rho = [](double w) {
        return [w](std::size_t n) { return std::exp(static_cast<double>(n) * std::log(w) + log_factorial(n)); };
    };
    VcsFamily f = families::diagonal_family("jaynes-cummings", rho(wp), rho(wm), [p](double r1, double r2) {
        return jc_normalization(p, r1, r2);
    });
    return f;
}

double jc_normalization(const JCParams& p, double r1, double r2) {
    return std::exp(r1 * r1 / p.omega_plus()) + std::exp(r2 * r2 / p.omega_minus());
}

VcsState build_jc_cs(const JCParams& p, Complex z1, Complex z2, std::size_t j, const FockTruncation& trunc) {
    const VcsFamily f = jc_family(p);
    FockTruncation t = trunc;
    t.n_components = 2;
    return build_vcs(f.moments, families::diagonal_label(z1, z2), j, t, Ordering::RZ,
                     jc_normalization(p, std::abs(z1), std::abs(z2)));
}

VcsState build_rotated_cs(const JCParams& p, Complex z1, Complex z2, double x, std::size_t k,
                          const FockTruncation& trunc) {
    const VcsFamily base = jc_family(p);
    const ComplexMatrix u = families::rotation(x);
    MomentFamily rotated = base.moments;
    rotated.name = "jaynes-cummings-rotated";
    rotated.generator = [gen = base.moments.generator, u](std::size_t n) {
        return ComplexMatrix(u * gen(n) * u.adjoint());
    };
    FockTruncation t = trunc;
    t.n_components = 2;
    const ComplexMatrix z = u * families::diagonal_label(z1, z2) * u.adjoint();
    return build_vcs(rotated, z, k, t, Ordering::RZ, jc_normalization(p, std::abs(z1), std::abs(z2)));
}

VcsState rotated_cs_closed_form(const JCParams& p, Complex z1, Complex z2, double x, std::size_t k,
                                std::size_t levels) {
    p.validate();
    const double c = std::cos(x);
    const double s = std::sin(x);
    VcsState out;
    out.truncation.n_components = 2;
    out.coefficients.resize(2, idx(levels));
    out.normalization = jc_normalization(p, std::abs(z1), std::abs(z2));
    out.component = k;
    const double w1 = std::sqrt(p.omega_plus());
    const double w2 = std::sqrt(p.omega_minus());
    Complex d1 = 1.0;
    Complex d2 = 1.0;
    for (std::size_t n = 0; n < levels; ++n) {
        if (n > 0) {
            // z^n / sqrt(omega^n n!) by recursion
            const double sn = std::sqrt(static_cast<double>(n));
            d1 *= z1 / (w1 * sn);
            d2 *= z2 / (w2 * sn);
        }
        const Complex off = s * c * (d1 - d2);
        if (k == 0) {
            out.coefficients(0, idx(n)) = c * c * d1 + s * s * d2;
            out.coefficients(1, idx(n)) = off;
        } else {
            out.coefficients(0, idx(n)) = off;
            out.coefficients(1, idx(n)) = s * s * d1 + c * c * d2;
        }
    }
    return out;
}

VcsState general_cs(const std::vector<VcsState>& states, const std::vector<Complex>& weights) {
    double total = 0.0;
    for (const auto& c : weights) total += std::norm(c);
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "general_cs: sum |c_k|^2 = " << total << ", expected 1";
        throw DomainError(os.str());
    }
    return superpose(states, weights);
}

FockVector apply_observable(const JCParams& p, Observable op, const VcsState& s, std::size_t branch) {
    if (s.components() != 2) throw DimensionError("JC observables act on two-component states");
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(2, idx(s.levels() + 2));
    psi.leftCols(idx(s.levels())) = s.normalized();
    const double wp = p.omega_plus();
    const double wm = p.omega_minus();
    const double wk = p.branch_frequency(branch);
    FockVector out;
    switch (op) {
        case Observable::A: out.coefficients = lower(p, psi); break;
        case Observable::Adag: out.coefficients = raise(p, psi); break;
        case Observable::HD: out.coefficients = number(psi, wp, wm); break;
        case Observable::HD2: out.coefficients = number(number(psi, wp, wm), wp, wm); break;
        case Observable::Q: out.coefficients = apply_q(p, psi); break;
        case Observable::P: out.coefficients = apply_p(p, psi); break;
        case Observable::Q2: out.coefficients = apply_q(p, apply_q(p, psi)); break;
        case Observable::P2: out.coefficients = apply_p(p, apply_p(p, psi)); break;
        case Observable::BranchHD: out.coefficients = number(psi, wk, wk); break;
        case Observable::BranchHD2: out.coefficients = number(number(psi, wk, wk), wk, wk); break;
    }
    return out;
}

Complex expectation(const JCParams& p, Observable op, const VcsState& s, std::size_t branch) {
    const FockVector f = apply_observable(p, op, s, branch);
    const Eigen::MatrixXcd psi = s.normalized();
    Complex total = 0.0;
    for (Eigen::Index m = 0; m < psi.cols(); ++m) total += psi.col(m).dot(f.coefficients.col(m));
    return total;
}

Weights g_weights(const JCParams& p, double r1, double r2) {
    const double a = r1 * r1 / p.omega_plus();
    const double b = r2 * r2 / p.omega_minus();
    const double top = std::max(a, b);
    const double ea = std::exp(a - top);
    const double eb = std::exp(b - top);
    const double den = ea + eb;
    return {ea / den, eb / den};
}

JCObservables closed_form_observables(const JCParams& p, Complex z1, Complex z2, std::size_t k) {
    p.validate();
    const Weights w = g_weights(p, std::abs(z1), std::abs(z2));
    const Complex z = k == 0 ? z1 : z2;
    const double g = k == 0 ? w.g : w.gf;
    const double freq = p.branch_frequency(k);
    const double r = std::abs(z);
    const double r2 = r * r;
    const double th = std::arg(z);
    const double cos2 = std::cos(th) * std::cos(th);
    const double sin2 = std::sin(th) * std::sin(th);
    JCObservables o;
    o.mean_A = z * g;
    o.mean_Adag = std::conj(z) * g;
    o.mean_HD = r2 * g;
    o.mean_HD2 = r2 * (r2 + freq) * g;
    o.mean_Q = std::sqrt(2.0) * r * std::cos(th) * g;
    o.mean_P = std::sqrt(2.0) * r * std::sin(th) * g;
    o.var_Q = 2.0 * r2 * cos2 * w.g * w.gf + freq / 2.0 * g;
    o.var_P = 2.0 * r2 * sin2 * w.g * w.gf + freq / 2.0 * g;
    o.var_HD = o.mean_HD2 - o.mean_HD * o.mean_HD;
    o.snr = ratio(o.mean_Q, o.var_Q);
    if (o.mean_HD != 0.0) o.mandel = r2 * (k == 0 ? w.gf : w.g) + freq - 1.0;
    return o;
}

double snr_printed(const JCParams& p, Complex z1, Complex z2) {
    const Weights w = g_weights(p, std::abs(z1), std::abs(z2));
    const double r2 = std::norm(z1);
    const double cos2 = std::pow(std::cos(std::arg(z1)), 2);
    return 2.0 * r2 * cos2 * w.g * w.g / (4.0 * r2 * cos2 * w.g * w.gf + p.omega_minus() * w.gf);
}

JCObservables series_observables(const JCParams& p, const VcsState& s) {
    JCObservables o;
    o.mean_A = expectation(p, Observable::A, s);
    o.mean_Adag = expectation(p, Observable::Adag, s);
    o.mean_HD = expectation(p, Observable::HD, s).real();
    o.mean_HD2 = expectation(p, Observable::HD2, s).real();
    o.mean_Q = expectation(p, Observable::Q, s).real();
    o.mean_P = expectation(p, Observable::P, s).real();
    o.var_Q = expectation(p, Observable::Q2, s).real() - o.mean_Q * o.mean_Q;
    o.var_P = expectation(p, Observable::P2, s).real() - o.mean_P * o.mean_P;
    o.var_HD = o.mean_HD2 - o.mean_HD * o.mean_HD;
    o.snr = ratio(o.mean_Q, o.var_Q);
    o.mandel = ratio(o.var_HD, o.mean_HD);
    if (o.mandel) *o.mandel -= 1.0;
    return o;
}

double rotated_mean_hd(const JCParams& p, double r1, double r2, double x, std::size_t k) {
    const Weights w = g_weights(p, r1, r2);
    const double c2 = std::cos(x) * std::cos(x);
    const double s2 = std::sin(x) * std::sin(x);
    const double wp = p.omega_plus();
    const double wm = p.omega_minus();
    if (k == 0) return r1 * r1 * c2 * w.g + r2 * r2 * wp / wm * s2 * w.gf;
    return r1 * r1 * wm / wp * s2 * w.g + r2 * r2 * c2 * w.gf;
}

double rotated_mean_hd2(const JCParams& p, double r1, double r2, double x, std::size_t k) {
    const Weights w = g_weights(p, r1, r2);
    const double c2 = std::cos(x) * std::cos(x);
    const double s2 = std::sin(x) * std::sin(x);
    const double wp = p.omega_plus();
    const double wm = p.omega_minus();
    const double t1 = r1 * r1 * (r1 * r1 + wp);
    const double t2 = r2 * r2 * (r2 * r2 + wm);
    if (k == 0) return t1 * c2 * w.g + wp * wp * t2 / (wm * wm) * s2 * w.gf;
    return wm * wm * t1 / (wp * wp) * s2 * w.g + t2 * c2 * w.gf;
}

double max_difference(const JCObservables& a, const JCObservables& b) {
    double d = std::max({std::abs(a.mean_A - b.mean_A), std::abs(a.mean_Adag - b.mean_Adag),
                         std::abs(a.mean_HD - b.mean_HD), std::abs(a.mean_HD2 - b.mean_HD2),
                         std::abs(a.mean_Q - b.mean_Q), std::abs(a.mean_P - b.mean_P), std::abs(a.var_Q - b.var_Q),
                         std::abs(a.var_P - b.var_P), std::abs(a.var_HD - b.var_HD)});
    auto opt = [&](const std::optional<double>& x, const std::optional<double>& y) {
        if (x.has_value() != y.has_value()) return std::numeric_limits<double>::infinity();
        return x ? std::abs(*x - *y) : 0.0;
    };
    return std::max({d, opt(a.snr, b.snr), opt(a.mandel, b.mandel)});
}

VcsState time_evolve(const JCParams& p, const VcsState& s, double t) {
    if (s.components() != 2) throw DimensionError("time_evolve: two-component state expected");
    VcsState out = s;
    for (std::size_t c = 0; c < 2; ++c) {
        const double w = p.branch_frequency(c);
        for (std::size_t n = 0; n < s.levels(); ++n)
            out.coefficients(idx(c), idx(n)) *= std::polar(1.0, -w * static_cast<double>(n) * t);
    }
    return out;
}

audit::RadialMeasure jc_measure(const JCParams& p) {
    p.validate();
    const double wp = p.omega_plus();
    const double wm = p.omega_minus();
    audit::RadialMeasure m;
    m.name = "jaynes-cummings";
    m.dims = 2;
    m.density = [wp, wm](std::span<const double> r) {
        return r[0] * r[1] / (pi * pi * wp * wm) * std::exp(-r[0] * r[0] / wp - r[1] * r[1] / wm);
    };
    m.includes_normalization = true;
    m.angular_factor = 4.0 * pi * pi;
    m.t_scales = {wp, wm};
    return m;
}

SweepRow compare_point(const JCParams& p, const SweepPoint& pt, const FockTruncation& trunc) {
    SweepRow row;
    row.point = pt;
    const Complex z1 = std::polar(pt.r1, pt.theta1);
    const Complex z2 = std::polar(pt.r2, pt.theta2);
    for (std::size_t k = 0; k < 2; ++k) {
        const VcsState s = build_jc_cs(p, z1, z2, k, trunc);
        row.closed[k] = closed_form_observables(p, z1, z2, k);
        row.series[k] = series_observables(p, s);
        row.deviation = std::max(row.deviation, max_difference(row.closed[k], row.series[k]));
        const VcsState u = build_rotated_cs(p, z1, z2, pt.x, k, trunc);
        row.rotated_closed[k][0] = rotated_mean_hd(p, pt.r1, pt.r2, pt.x, k);
        row.rotated_closed[k][1] = rotated_mean_hd2(p, pt.r1, pt.r2, pt.x, k);
        row.rotated_series[k][0] = expectation(p, Observable::BranchHD, u, k).real();
        row.rotated_series[k][1] = expectation(p, Observable::BranchHD2, u, k).real();
        for (int i = 0; i < 2; ++i)
            row.deviation = std::max(row.deviation, std::abs(row.rotated_closed[k][i] - row.rotated_series[k][i]));
    }
    return row;
}

std::vector<SweepRow> observable_sweep(const JCParams& p, const std::vector<SweepPoint>& points,
                                       const FockTruncation& trunc, Execution exec) {
    p.validate();
    std::vector<SweepRow> rows(points.size());
    const auto count = static_cast<long>(points.size());
    if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < count; ++i) rows[static_cast<std::size_t>(i)] = compare_point(p, points[static_cast<std::size_t>(i)], trunc);
    } else {
        for (long i = 0; i < count; ++i) rows[static_cast<std::size_t>(i)] = compare_point(p, points[static_cast<std::size_t>(i)], trunc);
    }
    return rows;
}

}  // namespace vcs::jc
