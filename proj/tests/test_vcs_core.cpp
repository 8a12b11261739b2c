#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vcs/errors.hpp"
#include "vcs/families.hpp"
#include "vcs/vcs_core.hpp"

using namespace vcs;

namespace {

double inv_fact(std::size_t m) { return 1.0 / std::tgamma(static_cast<double>(m) + 1.0); }

FockTruncation fock(std::size_t n) {
    FockTruncation t;
    t.n_components = n;
    return t;
}

Complex random_label(std::mt19937_64& rng, double rmax) {
    std::uniform_real_distribution<double> ur(0.0, rmax);
    std::uniform_real_distribution<double> ut(0.0, 2.0 * std::numbers::pi);
    return std::polar(ur(rng), ut(rng));
}

// sum over j of <Z,j|Z,j>
double total_norm(const std::vector<VcsState>& states) {
    double s = 0.0;
    for (const auto& st : states) s += st.squared_norm();
    return s;
}

}  // namespace

TEST_CASE("scalar canonical coherent state coefficients") {
    const Complex z(0.7, -1.1);
    const auto s = build_scalar_cs([](std::size_t m) { return std::tgamma(m + 1.0); }, z, fock(1));
    CHECK(s.normalization == doctest::Approx(std::exp(std::norm(z))).epsilon(1e-14));
    Complex zm = 1.0;
    for (std::size_t m = 0; m < s.levels(); ++m) {
        const Complex expected = zm * std::sqrt(inv_fact(m));
        CHECK(std::abs(s.coefficients(0, static_cast<Eigen::Index>(m)) - expected) <= 1e-14 * (1.0 + std::abs(expected)));
        zm *= z;
    }
    CHECK(s.squared_norm() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("canonical overlap matches the closed form") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const Complex z = random_label(rng, 2.5);
        const Complex w = random_label(rng, 2.5);
        const auto rho = [](std::size_t m) { return std::tgamma(m + 1.0); };
        // dropped amplitudes are about sqrt(tail_tolerance)
        FockTruncation t = fock(1);
        t.tail_tolerance = 1e-28;
        auto a = build_scalar_cs(rho, z, t);
        auto b = build_scalar_cs(rho, w, t);
        const std::size_t levels = std::max(a.levels(), b.levels());
        const Complex got = inner_product(resize_levels(a, levels), resize_levels(b, levels));
        const Complex oracle = std::exp(-0.5 * std::norm(z) - 0.5 * std::norm(w) + std::conj(z) * w);
        CHECK(std::abs(got - oracle) < 1e-12);
    }
}

TEST_CASE("matrix_power agrees with repeated multiplication") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
        ComplexMatrix z(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) z(i, j) = Complex(g(rng), g(rng));
        ComplexMatrix direct = ComplexMatrix::Identity(3, 3);
        for (std::size_t p = 0; p <= 17; ++p) {
            CHECK((matrix_power(z, p) - direct).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + direct.cwiseAbs().maxCoeff()));
            direct = direct * z;
        }
    }
}

TEST_CASE("diagonal family: normalization is a sum of scalar series") {
    std::mt19937_64 rng(15);
    const auto rho1 = [](std::size_t m) { return std::tgamma(m + 1.0); };
    const auto rho2 = [](std::size_t m) { return std::pow(2.0, static_cast<double>(m)) * std::tgamma(m + 1.0); };
    const VcsFamily f = families::diagonal_family("test", rho1, rho2, {});
    for (int trial = 0; trial < 20; ++trial) {
        const Complex z1 = random_label(rng, 3.0);
        const Complex z2 = random_label(rng, 3.0);
        const ComplexMatrix z = families::diagonal_label(z1, z2);
        const auto states = build_family_states(f, z, fock(2));
        const double oracle = std::exp(std::norm(z1)) + std::exp(std::norm(z2) / 2.0);
        CHECK(states[0].normalization == doctest::Approx(oracle).epsilon(1e-13));
        CHECK(std::abs(total_norm(states) - 1.0) <= 1e-9);
        CHECK(states[0].tail_bound <= 1e-12);
    }
}

TEST_CASE("particular class with n = 2") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> ua(0.0, 2.0 * std::numbers::pi);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = ua(rng);
        Eigen::MatrixXd b(2, 2);
        b << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        const std::vector<std::function<Complex(Complex)>> f{[](Complex z) { return z; },
                                                             [](Complex z) { return 0.5 * z; }};
        const std::vector<std::function<double(std::size_t)>> rho{
            [](std::size_t m) { return std::sqrt(inv_fact(m)); },
            [](std::size_t m) { return std::sqrt(inv_fact(m) / std::pow(0.5, 2.0 * static_cast<double>(m))); }};
        const std::vector<Complex> z{random_label(rng, 3.0), random_label(rng, 3.0)};
        const auto pc = build_particular_class(b, f, z, rho, fock(2));
        // sum_i sum_m rho_i^2 |f_i|^{2m} = e^{|z1|^2} + e^{|z2|^2}
        const double oracle = std::exp(std::norm(z[0])) + std::exp(std::norm(z[1]));
        CHECK(pc.normalization == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(std::abs(total_norm(pc.states) - 1.0) <= 1e-9);
        const auto series = normalization_series(pc.family.moments, pc.z, Ordering::RZ, 1e-16, 512);
        CHECK(series.value == doctest::Approx(oracle).epsilon(1e-12));
    }
    Eigen::MatrixXd skew(2, 2);
    skew << 1.0, 0.5, 0.0, 1.0;
    CHECK_THROWS_AS(build_particular_class(skew, {[](Complex z) { return z; }, [](Complex z) { return z; }},
                                           {Complex(1.0), Complex(1.0)},
                                           {[](std::size_t) { return 1.0; }, [](std::size_t) { return 1.0; }},
                                           fock(2)),
                    PreconditionError);
}

TEST_CASE("Z-R construction and its admissibility conditions") {
    const VcsFamily cl = families::clifford_family(0.3, 0.7);
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Complex z = random_label(rng, 3.0);
        const double r = std::abs(z);
        const double rr[1] = {r};
        const ComplexMatrix zz = cl.amplitude(std::span<const double>(rr, 1)) * (z / std::max(r, 1e-300));
        const auto rep = check_zr_conditions(cl.moments, zz, 40);
        CHECK(rep.moment_deviation < 1e-12);
        CHECK(rep.power_deviation < 1e-12);
        double total = 0.0;
        for (std::size_t j = 0; j < 2; ++j) total += build_vcs_zr(cl.moments, zz, j, fock(2)).squared_norm();
        CHECK(std::abs(total - 1.0) <= 1e-9);
        CHECK(build_vcs_zr(cl.moments, zz, 0, fock(2)).normalization ==
              doctest::Approx(2.0 * std::exp(r * r)).epsilon(1e-12));
    }

    // Z with unequal singular values is not of Clifford type
    ComplexMatrix bad(2, 2);
    bad << 1.0, 0.0, 0.0, 2.0;
    CHECK_THROWS_AS(build_vcs_zr(cl.moments, bad, 0, fock(2)), PreconditionError);
}

TEST_CASE("state shapes, superposition and error paths") {
    const VcsFamily f = families::diagonal_family(
        "d", [](std::size_t m) { return std::tgamma(m + 1.0); }, [](std::size_t m) { return std::tgamma(m + 1.0); },
        {});
    const ComplexMatrix z = families::diagonal_label(Complex(0.4, 0.2), Complex(-0.3, 0.5));
    const auto s0 = build_vcs(f.moments, z, 0, fock(2), Ordering::RZ);
    const auto s1 = build_vcs(f.moments, z, 1, fock(2), Ordering::RZ);
    CHECK(s0.components() == 2);
    CHECK(s0.component == 0u);

    // the j = 0 and j = 1 states live in different components
    const std::size_t levels = std::max(s0.levels(), s1.levels());
    CHECK(std::abs(inner_product(resize_levels(s0, levels), resize_levels(s1, levels))) < 1e-15);

    const auto sup = superpose(std::vector<VcsState>{s0, s1}, std::vector<Complex>{Complex(0.6), Complex(0.0, 0.8)});
    CHECK(sup.levels() == levels);
    CHECK(sup.squared_norm() == doctest::Approx(0.36 * s0.squared_norm() + 0.64 * s1.squared_norm()).epsilon(1e-13));

    CHECK_THROWS_AS(inner_product(resize_levels(s0, 3), resize_levels(s0, 4)), DimensionError);
    CHECK_THROWS_AS(build_vcs(f.moments, z, 2, fock(2), Ordering::RZ), DimensionError);
    CHECK_THROWS_AS(build_vcs(f.moments, ComplexMatrix::Identity(3, 3), 0, fock(2), Ordering::RZ), DimensionError);
    FockTruncation bad = fock(2);
    bad.tail_tolerance = 0.0;
    CHECK_THROWS_AS(build_vcs(f.moments, z, 0, bad, Ordering::RZ), DomainError);

    // the series cannot converge inside a tiny cutoff at a large label
    FockTruncation tiny = fock(2);
    tiny.level_cutoff = 5;
    CHECK_THROWS_AS(build_vcs(f.moments, families::diagonal_label(3.0, 3.0), 0, tiny, Ordering::RZ), ConvergenceError);
}

TEST_CASE("check_flags names the failing level") {
    MomentFamily f;
    f.name = "singular-at-3";
    f.dimension = 2;
    f.invertible_all_m = true;
    f.generator = [](std::size_t m) {
        ComplexMatrix r = ComplexMatrix::Identity(2, 2);
        if (m == 3) r(1, 1) = 0.0;
        return r;
    };
    try {
        f.check_flags(10);
        FAIL("expected a PreconditionError");
    } catch (const PreconditionError& e) {
        CHECK(e.index() == 3);
    }
    f.r0_identity = true;
    f.generator = [](std::size_t) { return ComplexMatrix(2.0 * ComplexMatrix::Identity(2, 2)); };
    CHECK_THROWS_AS(f.check_flags(0), PreconditionError);
}
