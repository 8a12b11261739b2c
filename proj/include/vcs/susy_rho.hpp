#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "vcs/mathcore.hpp"
#include "vcs/moment_audit.hpp"
#include "vcs/parallel.hpp"
#include "vcs/vcs_core.hpp"

namespace vcs::rho {

struct RhoParams {
    double gamma = 0.0;
    double epsilon = 1.0;
    double beta = 0.0;

    /// gamma >= 0 and epsilon > -1; throws ParameterError.
    void validate() const;
    /// The two positivity conditions on (gamma, epsilon, beta); empty when both hold.
    std::vector<std::string> positivity_violations() const;
};

enum class Branch { Plus, Minus };

/// E_n^+ = 2n + 1 + epsilon, E_0^- = 0, E_{n+1}^- = E_n^+.
double rho_energy(const RhoParams& p, std::size_t n, Branch b);

struct Moments {
    double plus = 1.0;   ///< 2^n n!
    double minus = 1.0;  ///< 2^n ((epsilon+3)/2)_n
};

Moments rho_moments(const RhoParams& p, std::size_t n);

/// e^{r1^2/2} + 1F1(1; (epsilon+3)/2; r2^2/2)
double rho_normalization(const RhoParams& p, double r1, double r2,
                         const math::SpecialFunctionConfig& cfg = {});

VcsFamily rho_family(const RhoParams& p);

/// |Z, j> with j zero-based.
VcsState build_rho_cs(const RhoParams& p, Complex z1, Complex z2, std::size_t j, const FockTruncation& trunc);

struct Potentials {
    double v_plus = 0.0;
    double v_minus = 0.0;
    double u = 0.0;
    double du = 0.0;
};

/// u(x) = 1F1((1-eps)/2; -gamma-1/2; -x^2) + beta x^{2 gamma + 3} 1F1(2 + gamma - eps/2; 5/2 + gamma; -x^2).
/// Throws DomainError at x <= 0 or where |u| < 1e-10 (a singularity of V_-).
Potentials rho_potentials(const RhoParams& p, double x, const math::SpecialFunctionConfig& cfg = {});

/// The measure as stated (name "paper") and the corrected one (name "corrected").
std::pair<audit::RadialMeasure, audit::RadialMeasure> rho_measures(const RhoParams& p);

/// |4 / (2^{(eps+3)/2} Gamma((eps+3)/2)) - 1|: the level-0 defect of the stated measure.
double paper_measure_level0_defect(double epsilon);

/// Diagonal family with one moment sequence rho(n) in both components.
VcsFamily broken_susy_family(std::function<double(std::size_t)> rho);

VcsState broken_susy_cs(const std::function<double(std::size_t)>& rho, Complex z1, Complex z2, std::size_t j,
                        const FockTruncation& trunc);

/// U = [[a, -conj b], [b, conj a]] with |a|^2 + |b|^2 = 1.
struct SU2Element {
    Complex a = 1.0;
    Complex b = 0.0;

    ComplexMatrix matrix() const;
    /// Throws PreconditionError unless U^dagger U = I and det U = 1 to 1e-12.
    void validate() const;
};

/// Haar-distributed element: normalized 4-vector of independent Gaussians.
SU2Element haar_su2(std::mt19937_64& rng);

/// (U Z U^dagger)^n / sqrt(rho(n)) chi_j. The normalization is summed from the
/// rotated series, so comparing it with the unrotated value is a real check.
VcsState su2_rotated_cs(const std::function<double(std::size_t)>& rho, Complex z1, Complex z2,
                        const SU2Element& u, std::size_t j, const FockTruncation& trunc);

/// Monte-Carlo audit of the Haar-averaged resolution of identity for the
/// quaternionic case z2 = conj z1, rho(n) = n!: r^2 ~ Exp(1), theta ~ U[0, 2 pi),
/// U Haar. Estimates the blocks (n, l) of sum_j |Z,U,j><Z,U,j| dmu dnu for
/// n, l <= max_level; the target is delta_nl I_2.
struct MonteCarloReport {
    std::size_t samples = 0;
    std::size_t streams = 0;
    std::uint64_t seed = 0;
    std::size_t max_level = 0;
    std::vector<ComplexMatrix> blocks;  ///< row-major (n, l)
    double deviation = 0.0;             ///< max |block - delta_nl I|
    double standard_error = 0.0;        ///< largest per-entry standard error
};

MonteCarloReport haar_resolution_audit(std::size_t samples, std::size_t max_level, std::uint64_t seed,
                                       std::size_t streams = 8, Execution exec = Execution::Parallel);

}  // namespace vcs::rho
