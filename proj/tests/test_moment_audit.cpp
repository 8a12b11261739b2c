#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "vcs/errors.hpp"
#include "vcs/families.hpp"
#include "vcs/moment_audit.hpp"

using namespace vcs;
using namespace vcs::audit;

namespace {

double inv_fact(std::size_t m) { return std::exp(-std::lgamma(static_cast<double>(m) + 1.0)); }

}  // namespace

TEST_CASE("moment matrix traces sum to the normalization") {
    // Tr[P_m][P_m]^dagger = csc^2 x ((lambda^2 r^2 / s1)^m + (mu^2 r^2 / s2)^m) / m!
    for (const auto& spec : {families::example22a_spec(), families::example22b_spec()}) {
        const VcsFamily f = families::example22(spec);
        const double csc2 = 1.0 / std::pow(std::sin(spec.x), 2);
        for (double r : {0.3, 1.0, 2.2}) {
            const double rr[1] = {r};
            const ComplexMatrix a = f.amplitude(std::span<const double>(rr, 1));
            for (std::size_t m = 0; m <= 30; ++m) {
                const double oracle = csc2 * inv_fact(m) *
                                      (std::pow(spec.lambda * spec.lambda * r * r / spec.s1, m) +
                                       std::pow(spec.mu * spec.mu * r * r / spec.s2, m));
                CHECK(moment_matrix(f, a, m).trace().real() == doctest::Approx(oracle).epsilon(1e-11));
            }
        }
    }
    const VcsFamily c = families::canonical_family();
    const double rr[1] = {1.7};
    const ComplexMatrix a = c.amplitude(std::span<const double>(rr, 1));
    for (std::size_t m = 0; m <= 40; ++m)
        CHECK(moment_matrix(c, a, m)(0, 0).real() ==
              doctest::Approx(std::pow(1.7, 2.0 * static_cast<double>(m)) * inv_fact(m)).epsilon(1e-13));
}

TEST_CASE("canonical coherent states resolve the identity") {
    const auto rep = audit_resolution(families::canonical_family(), families::canonical_measure(), 40, 1e-12);
    CHECK(rep.pass);
    CHECK(rep.deviation < 1e-12);
    CHECK(rep.blocks.size() == 41);
    // block diagonal: the assembled deviation is the worst block
    CHECK(rep.deviation == doctest::Approx(rep.max_block_deviation).epsilon(1e-15));
}

TEST_CASE("serial reference, stacked serial and stacked parallel agree") {
    const VcsFamily f = families::example22(families::example22a_spec());
    const RadialMeasure w = families::example22_measure(families::example22a_spec());
    const auto serial = audit_moments(f, w, 12, 1e-12, Execution::Serial);
    const auto parallel = audit_moments(f, w, 12, 1e-12, Execution::Parallel);
    for (std::size_t m = 0; m <= 12; ++m) {
        CHECK((serial[m].value - parallel[m].value).cwiseAbs().maxCoeff() == 0.0);
        const MomentAudit ref = audit_moment(f, w, m, 1e-12);
        CHECK((ref.value - serial[m].value).cwiseAbs().maxCoeff() < 1e-13);
        CHECK(ref.pass);
    }
}

TEST_CASE("a mis-scaled weight is reported, not hidden") {
    RadialMeasure w = families::canonical_measure();
    const auto base = w.density;
    w.density = [base](std::span<const double> r) { return 1.1 * base(r); };
    const auto rep = audit_resolution(families::canonical_family(), w, 10, 1e-12);
    CHECK_FALSE(rep.pass);
    CHECK(rep.deviation == doctest::Approx(0.1).epsilon(1e-10));

    // the printed weight of example (a) applied to example (b): csc^2(pi/6) = 4 against 2
    const auto lit = audit_resolution(families::example22(families::example22b_spec()),
                                      families::example22_literal_measure(), 10, 1e-12);
    CHECK_FALSE(lit.pass);
    CHECK(lit.deviation == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("density without the normalization folded in") {
    RadialMeasure w = families::canonical_measure();
    // W d nu = N(r) e^{-r^2} r / pi; the audit divides by N
    w.density = [](std::span<const double> r) { return r[0] / std::numbers::pi; };
    w.includes_normalization = false;
    const auto rep = audit_resolution(families::canonical_family(), w, 20, 1e-12);
    CHECK(rep.pass);
    CHECK(rep.deviation < 1e-12);
}

TEST_CASE("measure validation") {
    RadialMeasure w = families::canonical_measure();
    CHECK(w.sampled_minimum() >= 0.0);
    w.t_scales = {1.0, 1.0};
    CHECK_THROWS_AS(w.validate(), DimensionError);
    w = families::canonical_measure();
    w.angular_factor = 0.0;
    CHECK_THROWS_AS(w.validate(), DomainError);
    CHECK_THROWS_AS(audit_resolution(families::canonical_family(), families::canonical_measure(), 3, 0.0),
                    DomainError);
    RadialMeasure two = families::canonical_measure();
    two.dims = 2;
    two.t_scales = {1.0, 1.0};
    CHECK_THROWS_AS(audit_resolution(families::canonical_family(), two, 3, 1e-12), DimensionError);
}
