#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vcs/errors.hpp"
#include "vcs/families.hpp"

using namespace vcs;

namespace {

ComplexMatrix label(const VcsFamily& f, double r, double theta) {
    const double rr[1] = {r};
    return f.amplitude(std::span<const double>(rr, 1)) * std::polar(1.0, theta);
}

}  // namespace

TEST_CASE("rotation is orthogonal with unit determinant") {
    for (double x : {0.0, 0.3, std::numbers::pi / 4.0, 2.0}) {
        const ComplexMatrix u = families::rotation(x);
        CHECK((u * u.adjoint() - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(std::abs(u.determinant() - 1.0) < 1e-15);
    }
}

TEST_CASE("example families: closed forms match the trace series") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ur(0.0, 3.0);
    std::uniform_real_distribution<double> ut(0.0, 2.0 * std::numbers::pi);
    const std::vector<VcsFamily> fams{families::example22(families::example22a_spec()),
                                      families::example22(families::example22b_spec()),
                                      families::canonical_family(), families::clifford_family(0.3, 0.7),
                                      families::worked_example_family()};
    for (const auto& f : fams) {
        f.moments.check_flags(20);
        for (int trial = 0; trial < 10; ++trial) {
            const ComplexMatrix z = label(f, ur(rng), ut(rng));
            const auto series = normalization_series(f.moments, z, f.ordering, 1e-16, 512);
            CHECK(f.closed_form_normalization(z) == doctest::Approx(series.value).epsilon(1e-12));
        }
    }
}

TEST_CASE("example (a) has unit-trace products at r = 1 independent of the phase") {
    const VcsFamily f = families::example22(families::example22a_spec());
    // N(r) = 2 (e^{r^2} + e^{r^2}) at lambda = 1, mu = 2, s = (1, 4)
    for (double theta : {0.0, 1.0, 2.5})
        CHECK(f.closed_form_normalization(label(f, 1.0, theta)) == doctest::Approx(4.0 * std::exp(1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(families::example22({0.0, 1.0, 1.0, 1.0, 1.0}), DomainError);
}

TEST_CASE("worked 2x2 family has R(0) = I and Z-R ordering") {
    const VcsFamily f = families::worked_example_family();
    CHECK((f.moments(0) - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(f.ordering == Ordering::ZR);
    // R(m) = R_a(m)^dagger R_a(0)^{-dagger}, with R_a the example (a) generator
    const VcsFamily a = families::example22(families::example22a_spec());
    for (std::size_t m = 1; m <= 6; ++m) {
        const ComplexMatrix oracle = a.moments(m).adjoint() * a.moments(0).adjoint().inverse();
        CHECK((f.moments(m) - oracle).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("Clifford family satisfies the Z-R conditions; the probe does not commute") {
    const VcsFamily c = families::clifford_family(0.4, 1.1);
    const auto rep = check_zr_conditions(c.moments, label(c, 1.3, 0.2), 30);
    CHECK(rep.moment_deviation < 1e-12);
    CHECK(rep.power_deviation < 1e-12);

    const VcsFamily p = families::noncommuting_probe(0.4, 0.5);
    const ComplexMatrix z = label(p, 1.0, 0.0);
    CHECK_FALSE(p.moments.commutes_with_z);
    CHECK((p.moments(1) * z - z * p.moments(1)).cwiseAbs().maxCoeff() > 0.1);
    // V is unitary, so the Z-R construction is still admissible
    CHECK(check_zr_conditions(p.moments, z, 20).power_deviation < 1e-12);
}

TEST_CASE("diagonal family") {
    const VcsFamily f = families::diagonal_family(
        "d", [](std::size_t m) { return std::tgamma(m + 1.0); },
        [](std::size_t m) { return std::tgamma(m + 2.0); },
        [](double r1, double r2) { return std::exp(r1 * r1) + (std::exp(r2 * r2) - 1.0) / (r2 * r2); });
    CHECK(f.radial_dims == 2);
    const ComplexMatrix z = families::diagonal_label(Complex(0.5, 0.5), Complex(-1.2, 0.3));
    const auto series = normalization_series(f.moments, z, f.ordering, 1e-16, 512);
    CHECK(f.closed_form_normalization(z) == doctest::Approx(series.value).epsilon(1e-13));
}
