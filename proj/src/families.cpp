#include "vcs/families.hpp"

#include <cmath>
#include <numbers>

#include "vcs/errors.hpp"

namespace vcs::families {

namespace {

using std::numbers::pi;

double factorial_ratio(double s, std::size_t m) {
    // 1 / (s^m m!) via lgamma, safe for large m
    return std::exp(-static_cast<double>(m) * std::log(s) - std::lgamma(static_cast<double>(m) + 1.0));
}

double inverse_factorial(std::size_t m) { return std::exp(-std::lgamma(static_cast<double>(m) + 1.0)); }

}  // namespace

ComplexMatrix rotation(double x) {
    ComplexMatrix u(2, 2);
    u << std::cos(x), -std::sin(x), std::sin(x), std::cos(x);
    return u;
}

ComplexMatrix diagonal_label(Complex z1, Complex z2) {
    ComplexMatrix z = ComplexMatrix::Zero(2, 2);
    z(0, 0) = z1;
    z(1, 1) = z2;
    return z;
}

Example22Spec example22a_spec() { return {pi / 4.0, 1.0, 2.0, 1.0, 4.0}; }

Example22Spec example22b_spec() { return {pi / 6.0, 3.0, 2.0, 9.0, 4.0}; }

VcsFamily example22(const Example22Spec& spec) {
    if (std::abs(std::sin(spec.x)) < 1e-12) throw DomainError("example22: cot x is undefined");
    const double cot = std::cos(spec.x) / std::sin(spec.x);
    const double csc2 = 1.0 / (std::sin(spec.x) * std::sin(spec.x));
    VcsFamily f;
    f.moments.name = "example22";
    f.moments.dimension = 2;
    f.moments.generator = [spec, cot](std::size_t m) {
        const double r1 = std::sqrt(factorial_ratio(spec.s1, m));
        const double r2 = std::sqrt(factorial_ratio(spec.s2, m));
        ComplexMatrix r(2, 2);
        r << r1 * cot, r1, r2, -r2 * cot;
        return r;
    };
    f.moments.invertible_all_m = true;
    f.ordering = Ordering::RZ;
    f.radial_dims = 1;
    const ComplexMatrix b = rotation(spec.x);
    f.amplitude = [spec, b](std::span<const double> r) {
        return ComplexMatrix(b * diagonal_label(spec.lambda * r[0], spec.mu * r[0]) * b.transpose());
    };
    // R(m) picks out the lambda^m component of Z^m against a mu^m one, so double
    // arithmetic loses (mu/lambda)^m in relative accuracy; long double keeps m <= 60 clean.
    f.moment_product = [spec](std::size_t m, std::span<const double> r) {
        using LMat = Eigen::Matrix<long double, 2, 2>;
        const long double x = spec.x;
        const long double c = std::cos(x);
        const long double s = std::sin(x);
        const long double ct = c / s;
        const long double mm = static_cast<long double>(m);
        const long double lg = std::lgamma(mm + 1.0L);
        const long double r1 = std::exp(-0.5L * (mm * std::log(static_cast<long double>(spec.s1)) + lg));
        const long double r2 = std::exp(-0.5L * (mm * std::log(static_cast<long double>(spec.s2)) + lg));
        LMat rm;
        rm << r1 * ct, r1, r2, -r2 * ct;
        LMat bl;
        bl << c, -s, s, c;
        LMat d = LMat::Zero();
        d(0, 0) = spec.lambda * static_cast<long double>(r[0]);
        d(1, 1) = spec.mu * static_cast<long double>(r[0]);
        const LMat z = bl * d * bl.transpose();
        LMat p = rm;
        for (std::size_t k = 0; k < m; ++k) p = p * z;
        return ComplexMatrix(p.cast<double>().cast<Complex>());
    };
    // The singular values of Z are lambda r and mu r.
    f.closed_form_normalization = [spec, csc2](const ComplexMatrix& z) {
        Eigen::JacobiSVD<ComplexMatrix> svd(z);
        const double r = svd.singularValues()(0) / std::max(spec.lambda, spec.mu);
        return csc2 * (std::exp(spec.lambda * spec.lambda * r * r / spec.s1) +
                       std::exp(spec.mu * spec.mu * r * r / spec.s2));
    };
    return f;
}

audit::RadialMeasure example22_measure(const Example22Spec& spec) {
    const double csc2 = 1.0 / (std::sin(spec.x) * std::sin(spec.x));
    audit::RadialMeasure m;
    m.name = "example22";
    m.dims = 1;
    m.density = [csc2](std::span<const double> r) {
        return std::exp(-r[0] * r[0]) / (2.0 * csc2) * (2.0 / pi) * r[0];
    };
    m.includes_normalization = true;
    m.angular_factor = 2.0 * pi;
    m.t_scales = {1.0};
    return m;
}

audit::RadialMeasure example22_literal_measure() {
    audit::RadialMeasure m;
    m.name = "example22-printed";
    m.dims = 1;
    m.density = [](std::span<const double> r) { return std::exp(-r[0] * r[0]) / 4.0 * (2.0 / pi) * r[0]; };
    m.includes_normalization = true;
    m.angular_factor = 2.0 * pi;
    m.t_scales = {1.0};
    return m;
}

VcsFamily canonical_family() {
    VcsFamily f;
    f.moments.name = "canonical";
    f.moments.dimension = 1;
    f.moments.generator = [](std::size_t m) {
        ComplexMatrix r(1, 1);
        r(0, 0) = std::sqrt(inverse_factorial(m));
        return r;
    };
    f.moments.invertible_all_m = true;
    f.moments.r0_identity = true;
    f.moments.commutes_with_z = true;
    f.ordering = Ordering::ZR;
    f.radial_dims = 1;
    f.amplitude = [](std::span<const double> r) {
        ComplexMatrix a(1, 1);
        a(0, 0) = r[0];
        return a;
    };
    f.closed_form_normalization = [](const ComplexMatrix& z) { return std::exp(std::norm(z(0, 0))); };
    return f;
}

audit::RadialMeasure canonical_measure() {
    audit::RadialMeasure m;
    m.name = "canonical";
    m.dims = 1;
    m.density = [](std::span<const double> r) { return r[0] * std::exp(-r[0] * r[0]) / pi; };
    m.angular_factor = 2.0 * pi;
    m.t_scales = {1.0};
    return m;
}

VcsFamily clifford_family(double alpha, double beta) {
    VcsFamily f;
    f.moments.name = "clifford";
    f.moments.dimension = 2;
    f.moments.generator = [alpha](std::size_t m) {
        return ComplexMatrix(rotation(static_cast<double>(m) * alpha) * std::sqrt(inverse_factorial(m)));
    };
    f.moments.invertible_all_m = true;
    f.moments.r0_identity = true;
    f.moments.commutes_with_z = true;
    f.ordering = Ordering::ZR;
    f.radial_dims = 1;
    const ComplexMatrix u = rotation(beta);
    f.amplitude = [u](std::span<const double> r) { return ComplexMatrix(r[0] * u); };
    f.closed_form_normalization = [](const ComplexMatrix& z) {
        return 2.0 * std::exp(z.squaredNorm() / 2.0);
    };
    return f;
}

audit::RadialMeasure clifford_measure() {
    audit::RadialMeasure m = canonical_measure();
    m.name = "clifford";
    return m;
}

VcsFamily noncommuting_probe(double alpha, double b) {
    VcsFamily f = clifford_family(alpha, 0.0);
    f.moments.name = "noncommuting-probe";
    f.moments.commutes_with_z = false;
    ComplexMatrix v(2, 2);
    v << std::cos(b), Complex(0.0, std::sin(b)), Complex(0.0, std::sin(b)), std::cos(b);
    f.amplitude = [v](std::span<const double> r) { return ComplexMatrix(r[0] * v); };
    return f;
}

VcsFamily worked_example_family() {
    const Example22Spec spec = example22a_spec();
    const VcsFamily base = example22(spec);
    const ComplexMatrix r0_inv = base.moments(0).adjoint().inverse();
    VcsFamily f;
    f.moments.name = "worked-example";
    f.moments.dimension = 2;
    f.moments.generator = [gen = base.moments.generator, r0_inv](std::size_t m) {
        if (m == 0) return ComplexMatrix(ComplexMatrix::Identity(2, 2));
        return ComplexMatrix(gen(m).adjoint() * r0_inv);
    };
    f.moments.invertible_all_m = true;
    f.moments.r0_identity = true;
    f.moments.commutes_with_z = true;
    f.ordering = Ordering::ZR;
    f.radial_dims = 1;
    f.amplitude = base.amplitude;
    // Tr|Z^m R(m)|^2 = r^{2m}/m! + (2r)^{2m}/(4^m m!)
    f.closed_form_normalization = [](const ComplexMatrix& z) {
        Eigen::JacobiSVD<ComplexMatrix> svd(z);
        const double r = svd.singularValues()(0) / 2.0;
        return 2.0 * std::exp(r * r);
    };
    return f;
}

VcsFamily diagonal_family(const std::string& name, std::function<double(std::size_t)> rho1,
                          std::function<double(std::size_t)> rho2,
                          std::function<double(double, double)> normalization) {
    VcsFamily f;
    f.moments.name = name;
    f.moments.dimension = 2;
    f.moments.generator = [rho1, rho2](std::size_t m) {
        return diagonal_label(1.0 / std::sqrt(rho1(m)), 1.0 / std::sqrt(rho2(m)));
    };
    f.moments.invertible_all_m = true;
    f.moments.r0_identity = true;
    f.moments.commutes_with_z = true;
    f.ordering = Ordering::RZ;
    f.radial_dims = 2;
    f.amplitude = [](std::span<const double> r) { return diagonal_label(r[0], r[1]); };
    if (normalization)
        f.closed_form_normalization = [normalization](const ComplexMatrix& z) {
            return normalization(std::abs(z(0, 0)), std::abs(z(1, 1)));
        };
    return f;
}

}  // namespace vcs::families
