#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vcs/moment_audit.hpp"
#include "vcs/parallel.hpp"
#include "vcs/vcs_core.hpp"

namespace vcs::jc {

/// hbar = 1. Derived quantities follow r(n) = sqrt(delta + n), delta = (Delta / 2 kappa)^2.
struct JCParams {
    double omega = 1.0;
    double omega0 = 0.5;
    double kappa = 0.1;

    double detuning() const { return omega - omega0; }
    double delta() const;
    /// omega +- kappa^2 / Delta
    double omega_plus() const;
    double omega_minus() const;
    double branch_frequency(std::size_t component) const;

    /// Throws ParameterError on Delta <= 0, kappa <= 0, kappa/omega > 2 sqrt(delta+1)
    /// or omega_minus <= 0.
    void validate() const;
};

struct BranchEnergies {
    double plus = 0.0;
    double minus = 0.0;
};

/// E_n^+ = omega n + kappa r(n), E_n^- = omega (n+1) - kappa r(n+1).
BranchEnergies exact_energies(const JCParams& p, std::size_t n);

/// e_n^+- = E_n^+- - E_0^+-.
BranchEnergies excitation_energies(const JCParams& p, std::size_t n);

struct Slopes {
    double plus = 0.0;
    double minus = 0.0;
};

Slopes weak_coupling_slopes(const JCParams& p);

/// H_JC on |n, up>, |n, down> for n = 0..M, ordered (0 up, 0 down, 1 up, ...).
/// sigma_+- are the spin raising/lowering matrices (sigma_1 +- i sigma_2)/2.
Eigen::MatrixXd build_hjc_truncated(const JCParams& p, std::size_t m);

/// Branch energies of the truncated matrix, read off its 2x2 blocks
/// {|n, up>, |n+1, down>} (the isolated |0, down> gives E_0^+).
struct TruncatedSpectrum {
    std::vector<double> plus;   ///< E_n^+ for n = 0..M
    std::vector<double> minus;  ///< E_n^- for n = 0..M-1
};

TruncatedSpectrum truncated_spectrum(const JCParams& p, std::size_t m);

/// R(n) = diag(rho_+(n), rho_-(n)), rho_+-(n) = omega_+-^n n!, used as R(n)^{-1/2}.
VcsFamily jc_family(const JCParams& p);

/// e^{r1^2/omega_+} + e^{r2^2/omega_-}
double jc_normalization(const JCParams& p, double r1, double r2);

/// |Z, j> with j zero-based (0 is |Z,1>).
VcsState build_jc_cs(const JCParams& p, Complex z1, Complex z2, std::size_t j, const FockTruncation& trunc);

/// U R(n)^{-1/2} Z^n U^dagger chi_k with U = rotation(x), built as the R-Z family
/// R'(n) = U R(n)^{-1/2} U^dagger at Z' = U Z U^dagger.
VcsState build_rotated_cs(const JCParams& p, Complex z1, Complex z2, double x, std::size_t k,
                          const FockTruncation& trunc);

/// The explicit two-line form in terms of |z1>, |z2>, on `levels` levels.
VcsState rotated_cs_closed_form(const JCParams& p, Complex z1, Complex z2, double x, std::size_t k,
                                std::size_t levels);

/// c_1 |Z,1> + c_2 |Z,2> (or any list); throws DomainError when sum |c|^2 != 1 by > 1e-12.
VcsState general_cs(const std::vector<VcsState>& states, const std::vector<Complex>& weights);

enum class Observable {
    A,
    Adag,
    HD,
    HD2,
    Q,
    P,
    Q2,
    P2,
    BranchHD,   ///< I_2 (x) omega_k n, k given by `branch`
    BranchHD2,  ///< its square
};

/// <psi|F|psi> on the normalized coefficient stack (squared norm of |Z,j> is G or G-frak).
/// A acts on component c as sqrt(omega_c) a.
Complex expectation(const JCParams& p, Observable op, const VcsState& s, std::size_t branch = 0);

/// F applied to the normalized stack, padded by two levels.
FockVector apply_observable(const JCParams& p, Observable op, const VcsState& s, std::size_t branch = 0);

struct JCObservables {
    Complex mean_A;
    Complex mean_Adag;
    double mean_HD = 0.0;
    double mean_HD2 = 0.0;
    double mean_Q = 0.0;
    double mean_P = 0.0;
    double var_Q = 0.0;
    double var_P = 0.0;
    double var_HD = 0.0;
    std::optional<double> snr;     ///< <Q> / (Delta Q)^2, empty when (Delta Q)^2 = 0
    std::optional<double> mandel;  ///< (Delta H_D)^2 / <H_D> - 1, empty when <H_D> = 0
};

/// G = e^{r1^2/omega_+} / N and G-frak = e^{r2^2/omega_-} / N, sharing one denominator.
struct Weights {
    double g = 0.0;
    double gf = 0.0;
};

Weights g_weights(const JCParams& p, double r1, double r2);

/// Closed forms on |Z,k> (k zero-based), built from the listed means.
JCObservables closed_form_observables(const JCParams& p, Complex z1, Complex z2, std::size_t k);

/// The stated closed form 2 r^2 cos^2 G^2 / (4 r^2 cos^2 G Gf + omega_- Gf) for |Z,1>, kept for comparison.
double snr_printed(const JCParams& p, Complex z1, Complex z2);

/// Series-side counterpart of closed_form_observables.
JCObservables series_observables(const JCParams& p, const VcsState& s);

/// Means of I_2 (x) omega_k n and its square on |Z,U,k>.
double rotated_mean_hd(const JCParams& p, double r1, double r2, double x, std::size_t k);
double rotated_mean_hd2(const JCParams& p, double r1, double r2, double x, std::size_t k);

/// Largest |closed - series| over every field of JCObservables.
double max_difference(const JCObservables& a, const JCObservables& b);

/// Phases e^{-i omega_c n t} per component c and level n.
VcsState time_evolve(const JCParams& p, const VcsState& s, double t);

/// d mu = r1 r2 / (pi^2 omega_+ omega_-) e^{-r1^2/omega_+} e^{-r2^2/omega_-} N dr dtheta.
audit::RadialMeasure jc_measure(const JCParams& p);

struct SweepPoint {
    double r1 = 0.0;
    double r2 = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    double x = 0.0;
};

struct SweepRow {
    SweepPoint point;
    JCObservables closed[2];
    JCObservables series[2];
    double rotated_closed[2][2] = {};  ///< [k][0] = <H_D>, [k][1] = <H_D^2>
    double rotated_series[2][2] = {};
    double deviation = 0.0;  ///< max over everything above
};

SweepRow compare_point(const JCParams& p, const SweepPoint& pt, const FockTruncation& trunc);

/// Independent grid points, evaluated concurrently in the Parallel mode.
std::vector<SweepRow> observable_sweep(const JCParams& p, const std::vector<SweepPoint>& points,
                                       const FockTruncation& trunc, Execution exec = Execution::Parallel);

}  // namespace vcs::jc
