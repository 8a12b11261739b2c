#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "vcs/errors.hpp"
#include "vcs/families.hpp"
#include "vcs/jaynes_cummings.hpp"

using namespace vcs;
using namespace vcs::jc;

namespace {

FockTruncation two_components() {
    FockTruncation t;
    t.n_components = 2;
    t.tail_tolerance = 1e-28;
    return t;
}

bool contains(const Eigen::VectorXd& values, double e) {
    return (values.array() - e).abs().minCoeff() < 1e-10 * (1.0 + std::abs(e));
}

}  // namespace

TEST_CASE("exact energies are eigenvalues of the truncated Hamiltonian") {
    for (const JCParams p : {JCParams{}, JCParams{1.3, 0.2, 0.4}, JCParams{2.0, 1.5, 0.05}}) {
        const std::size_t m = 20;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(build_hjc_truncated(p, m));
        const Eigen::VectorXd values = eig.eigenvalues();
        const auto spec = truncated_spectrum(p, m);
        REQUIRE(spec.plus.size() == m + 1);
        REQUIRE(spec.minus.size() == m);
        for (std::size_t n = 0; n < m; ++n) {
            const auto e = exact_energies(p, n);
            CHECK(contains(values, e.plus));
            CHECK(contains(values, e.minus));
            CHECK(spec.plus[n] == doctest::Approx(e.plus).epsilon(1e-12));
            CHECK(spec.minus[n] == doctest::Approx(e.minus).epsilon(1e-12));
        }
    }
}

TEST_CASE("weak coupling: excitation energies deviate from omega_+- n at order kappa^4") {
    // e_n^+ - omega_+ n ~ -n^2 kappa^4 / Delta^3, e_n^- - omega_- n ~ (n^2 + 2n) kappa^4 / Delta^3
    const double omega = 1.0;
    const double omega0 = 0.5;
    const double delta = omega - omega0;
    for (double kappa : {1e-2, 5e-3}) {
        const JCParams p{omega, omega0, kappa};
        const Slopes s = weak_coupling_slopes(p);
        CHECK(s.plus == doctest::Approx(omega + kappa * kappa / delta));
        CHECK(s.minus == doctest::Approx(omega - kappa * kappa / delta));
        for (std::size_t n = 1; n <= 5; ++n) {
            const double dn = static_cast<double>(n);
            const auto e = excitation_energies(p, n);
            const double k4 = std::pow(kappa, 4) / std::pow(delta, 3);
            CHECK((e.plus - s.plus * dn) == doctest::Approx(-dn * dn * k4).epsilon(1e-3));
            CHECK((e.minus - s.minus * dn) == doctest::Approx((dn * dn + 2.0 * dn) * k4).epsilon(1e-3));
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(JCParams({0.5, 1.0, 0.1}).validate(), ParameterError);
    CHECK_THROWS_AS(JCParams({1.0, 0.5, 0.0}).validate(), ParameterError);
    CHECK_THROWS_AS(JCParams({1.0, 0.5, 10.0}).validate(), ParameterError);
    // omega_- = 1 - 0.8^2 / 0.5 < 0
    CHECK_THROWS_AS(JCParams({1.0, 0.5, 0.8}).validate(), ParameterError);
    CHECK_NOTHROW(JCParams{}.validate());
}

TEST_CASE("normalization and branch weights") {
    const JCParams p{1.0, 0.5, 0.3};
    const VcsFamily f = jc_family(p);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> ur(0.0, 2.5);
    for (int trial = 0; trial < 10; ++trial) {
        const double r1 = ur(rng);
        const double r2 = ur(rng);
        const ComplexMatrix z = families::diagonal_label(Complex(r1), Complex(0.0, r2));
        const auto series = normalization_series(f.moments, z, f.ordering, 1e-16, 512);
        const double n = std::exp(r1 * r1 / p.omega_plus()) + std::exp(r2 * r2 / p.omega_minus());
        CHECK(jc_normalization(p, r1, r2) == doctest::Approx(n).epsilon(1e-14));
        CHECK(series.value == doctest::Approx(n).epsilon(1e-13));
        const Weights w = g_weights(p, r1, r2);
        CHECK(w.g + w.gf == doctest::Approx(1.0).epsilon(1e-15));
        const auto s0 = build_jc_cs(p, Complex(r1), Complex(0.0, r2), 0, two_components());
        const auto s1 = build_jc_cs(p, Complex(r1), Complex(0.0, r2), 1, two_components());
        CHECK(s0.squared_norm() == doctest::Approx(w.g).epsilon(1e-13));
        CHECK(s1.squared_norm() == doctest::Approx(w.gf).epsilon(1e-13));
    }
}

TEST_CASE("the first branch is a scaled Glauber state: <A> = z1 G") {
    const JCParams p{1.2, 0.4, 0.25};
    const Complex z1(0.9, -0.4);
    const Complex z2(0.3, 0.6);
    const auto s = build_jc_cs(p, z1, z2, 0, two_components());
    const Weights w = g_weights(p, std::abs(z1), std::abs(z2));
    CHECK(std::abs(expectation(p, Observable::A, s) - z1 * w.g) < 1e-13);
    CHECK(std::abs(expectation(p, Observable::Adag, s) - std::conj(z1) * w.g) < 1e-13);
    // <a^dagger a> = |alpha|^2 with alpha = z1 / sqrt(omega_+), times omega_+ and G
    CHECK(expectation(p, Observable::HD, s).real() == doctest::Approx(std::norm(z1) * w.g).epsilon(1e-12));
}

TEST_CASE("closed forms agree with the series") {
    const JCParams p;
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> ur(0.0, 2.0);
    std::uniform_real_distribution<double> ut(0.0, 6.283);
    for (int trial = 0; trial < 10; ++trial) {
        const Complex z1 = std::polar(ur(rng), ut(rng));
        const Complex z2 = std::polar(ur(rng), ut(rng));
        for (std::size_t k = 0; k < 2; ++k) {
            const auto s = build_jc_cs(p, z1, z2, k, two_components());
            CHECK(max_difference(closed_form_observables(p, z1, z2, k), series_observables(p, s)) < 1e-10);
        }
    }
}

TEST_CASE("vacuum: SNR is zero and the Mandel parameter is undefined") {
    const JCParams p;
    const auto o = closed_form_observables(p, Complex(0.0), Complex(0.0), 0);
    REQUIRE(o.snr.has_value());
    CHECK(*o.snr == 0.0);
    CHECK_FALSE(o.mandel.has_value());
    CHECK(o.var_Q == doctest::Approx(p.omega_plus() / 4.0));
}

TEST_CASE("rotated states") {
    const JCParams p{1.0, 0.3, 0.2};
    const Complex z1(0.8, 0.1);
    const Complex z2(-0.5, 0.7);
    for (double x : {0.0, 0.4, 1.2}) {
        for (std::size_t k = 0; k < 2; ++k) {
            const auto built = build_rotated_cs(p, z1, z2, x, k, two_components());
            const auto closed = rotated_cs_closed_form(p, z1, z2, x, k, built.levels());
            CHECK((built.normalized() - closed.normalized()).cwiseAbs().maxCoeff() < 1e-13);
            const double r1 = std::abs(z1);
            const double r2 = std::abs(z2);
            CHECK(rotated_mean_hd(p, r1, r2, x, k) ==
                  doctest::Approx(expectation(p, Observable::BranchHD, built, k).real()).epsilon(1e-10));
            CHECK(rotated_mean_hd2(p, r1, r2, x, k) ==
                  doctest::Approx(expectation(p, Observable::BranchHD2, built, k).real()).epsilon(1e-10));
        }
    }
}

TEST_CASE("general superpositions and time evolution") {
    const JCParams p;
    const Complex z1(0.6, 0.2);
    const Complex z2(0.1, -0.9);
    const auto s0 = build_jc_cs(p, z1, z2, 0, two_components());
    const auto s1 = build_jc_cs(p, z1, z2, 1, two_components());
    CHECK_THROWS_AS(general_cs({s0, s1}, {Complex(1.0), Complex(1.0)}), DomainError);
    const auto g = general_cs({s0, s1}, {Complex(0.6), Complex(0.0, 0.8)});
    // the branches live in different components
    CHECK(g.squared_norm() == doctest::Approx(0.36 * s0.squared_norm() + 0.64 * s1.squared_norm()).epsilon(1e-13));

    const auto e = time_evolve(p, s0, 2.7);
    CHECK(e.squared_norm() == doctest::Approx(s0.squared_norm()).epsilon(1e-14));
    CHECK(expectation(p, Observable::HD, e).real() ==
          doctest::Approx(expectation(p, Observable::HD, s0).real()).epsilon(1e-13));
    // <A>(t) = e^{-i omega_+ t} <A>(0) on the first branch
    CHECK(std::abs(expectation(p, Observable::A, e) -
                   std::polar(1.0, -p.omega_plus() * 2.7) * expectation(p, Observable::A, s0)) < 1e-13);
}

TEST_CASE("sweep: serial and parallel agree") {
    const JCParams p;
    std::vector<SweepPoint> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({0.3 * i, 1.0 - 0.1 * i, 0.2 * i, -0.3 * i, 0.1 * i});
    const auto a = observable_sweep(p, pts, two_components(), Execution::Serial);
    const auto b = observable_sweep(p, pts, two_components(), Execution::Parallel);
    REQUIRE(a.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(a[i].deviation == b[i].deviation);
        CHECK(a[i].deviation < 1e-10);
    }
}

TEST_CASE("measure resolves the identity on low levels") {
    const JCParams p;
    const auto rep = audit::audit_resolution(jc_family(p), jc_measure(p), 4, 1e-12);
    CHECK(rep.pass);
    CHECK(rep.deviation < 1e-12);
}
