#pragma once

#include <cstddef>
#include <functional>

#include "vcs/moment_audit.hpp"
#include "vcs/vcs_core.hpp"

namespace vcs::families {

/// Rotation by angle x: [[cos x, -sin x], [sin x, cos x]].
ComplexMatrix rotation(double x);

/// Two-component R-Z family with Z = B diag(lambda r, mu r) B^T e^{i zeta},
/// B = rotation(x), and R(m) rows rho_1(m) (cot x, 1), rho_2(m) (1, -cot x),
/// where rho_i(m)^2 = 1 / (s_i^m m!).
struct Example22Spec {
    double x = 0.0;
    double lambda = 1.0;
    double mu = 1.0;
    double s1 = 1.0;
    double s2 = 1.0;
};

Example22Spec example22a_spec();  ///< x = pi/4, lambda = 1, mu = 2, s = (1, 4)
Example22Spec example22b_spec();  ///< x = pi/6, lambda = 3, mu = 2, s = (9, 4)

VcsFamily example22(const Example22Spec& spec);

/// W = N e^{-r^2} / (2 csc^2 x) with d nu = (2/pi) r dr, angular 2 pi.
/// For x = pi/4 this is the stated W = N e^{-r^2}/4.
audit::RadialMeasure example22_measure(const Example22Spec& spec);

/// The stated weight W = N e^{-r^2}/4 used verbatim for any x.
audit::RadialMeasure example22_literal_measure();

/// Single-component canonical CS: R(m) = 1/sqrt(m!), N = e^{r^2}.
VcsFamily canonical_family();
audit::RadialMeasure canonical_measure();

/// Z-R family Z = r rotation(beta) e^{i theta}, R(m) = rotation(m alpha)/sqrt(m!).
/// B^m B^m^dagger = r^{2m} I and R R^dagger = I/m!, so N = 2 e^{r^2}.
VcsFamily clifford_family(double alpha, double beta);
audit::RadialMeasure clifford_measure();

/// Z-R family whose Z = r V with V = [[cos b, i sin b], [i sin b, cos b]] does
/// not commute with the rotations R(m) = rotation(m alpha)/sqrt(m!).
VcsFamily noncommuting_probe(double alpha, double b);

/// The matrices R(m)^dagger of example (a), right-multiplied by the inverse of
/// R(0)^dagger so that R(0) = I. Z-R ordering; x_m = (1/(4 sqrt m)) [[3,1],[1,3]].
VcsFamily worked_example_family();

/// Diagonal two-component family R(n) = diag(rho_1(n)^{-1/2}, rho_2(n)^{-1/2}),
/// Z = diag(r1, r2) e^{i theta_j}. `normalization` receives (r1, r2).
VcsFamily diagonal_family(const std::string& name, std::function<double(std::size_t)> rho1,
                          std::function<double(std::size_t)> rho2,
                          std::function<double(double, double)> normalization);

/// diag(z1, z2) as a matrix.
ComplexMatrix diagonal_label(Complex z1, Complex z2);

}  // namespace vcs::families
