#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vcs/mathcore.hpp"

namespace vcs {

/// Truncation of the Fock factor H of C^n (x) H to levels 0..M.
struct FockTruncation {
    std::size_t n_components = 1;
    std::size_t level_cutoff = 512;  ///< hard cap on M for adaptive truncation
    double tail_tolerance = 1e-13;   ///< relative weight allowed in the dropped levels

    void validate() const;
};

/// Which side of Z^m the moment matrix R(m) multiplies.
enum class Ordering { RZ, ZR };

/// The moment sequence m -> R(m) with its structural flags.
struct MomentFamily {
    std::string name;
    std::size_t dimension = 1;
    std::function<ComplexMatrix(std::size_t)> generator;
    bool invertible_all_m = false;
    bool r0_identity = false;
    bool commutes_with_z = false;

    ComplexMatrix operator()(std::size_t m) const { return generator(m); }

    /// Checks the declared flags on levels 0..up_to; throws PreconditionError naming the level.
    void check_flags(std::size_t up_to) const;
};

/// Z = A(r) e^{i zeta}.
struct MatrixVariable {
    ComplexMatrix amplitude;
    double phase = 0.0;

    ComplexMatrix value() const;
};

using AmplitudeMap = std::function<ComplexMatrix(std::span<const double>)>;
using NormalizationFn = std::function<double(const ComplexMatrix&)>;

/// A family of VCS: moments, ordering, and the radial parametrization r -> A(r)
/// used by the quadrature audits. `closed_form_normalization` is optional.
struct VcsFamily {
    MomentFamily moments;
    Ordering ordering = Ordering::RZ;
    std::size_t radial_dims = 1;
    AmplitudeMap amplitude;
    NormalizationFn closed_form_normalization;
    /// Optional P_m at radius r (phase dropped) in extended precision, for families
    /// whose R(m) A^m cancels more digits than double arithmetic holds.
    std::function<ComplexMatrix(std::size_t, std::span<const double>)> moment_product;

    std::size_t dimension() const { return moments.dimension; }
};

/// Coefficient stack {v_m}: column m holds v_m in C^n. Creation past the last
/// stored level accumulates its squared norm in `leakage`.
struct FockVector {
    Eigen::MatrixXcd coefficients;
    double leakage = 0.0;

    std::size_t components() const { return static_cast<std::size_t>(coefficients.rows()); }
    std::size_t levels() const { return static_cast<std::size_t>(coefficients.cols()); }
};

/// A VCS stored unnormalized: |psi> = N^{-1/2} sum_m v_m (x) phi_m.
struct VcsState {
    FockTruncation truncation;
    Eigen::MatrixXcd coefficients;
    double normalization = 1.0;
    /// Bound on the relative weight of the dropped levels of the j-summed family.
    double tail_bound = 0.0;
    /// Largest relative drift seen between accumulated and directly computed Z^m.
    double power_drift = 0.0;
    std::optional<std::size_t> component;

    std::size_t levels() const { return static_cast<std::size_t>(coefficients.cols()); }
    std::size_t components() const { return static_cast<std::size_t>(coefficients.rows()); }

    /// N^{-1} sum_m |v_m|^2.
    double squared_norm() const;
    /// Coefficients divided by sqrt(N).
    Eigen::MatrixXcd normalized() const;
    FockVector as_fock() const { return {coefficients, 0.0}; }
};

/// Z^p by binary exponentiation.
ComplexMatrix matrix_power(const ComplexMatrix& z, std::size_t p);

/// Scalar CS of a positive moment sequence rho: v_m = z^m / sqrt(rho(m)).
VcsState build_scalar_cs(const std::function<double(std::size_t)>& rho, Complex z,
                         const FockTruncation& trunc);

/// Normalization series N = sum_m Tr |P_m|^2, with P_m = R(m) Z^m (RZ) or Z^m R(m) (ZR).
/// rel_tol controls where the certified tail stops the sum.
math::SeriesSum normalization_series(const MomentFamily& family, const ComplexMatrix& z,
                                     Ordering ordering, double rel_tol, std::size_t max_level);

/// Normalization of the R-Z construction, summed to machine precision.
math::SeriesSum normalization_rz(const MomentFamily& family, const ComplexMatrix& amplitude,
                                 const FockTruncation& trunc);

/// Generic builder shared by both orderings. When `normalization` is empty the
/// constant is summed from the trace series.
VcsState build_vcs(const MomentFamily& family, const ComplexMatrix& z, std::size_t j,
                   const FockTruncation& trunc, Ordering ordering,
                   std::optional<double> normalization = std::nullopt);

VcsState build_vcs_rz(const MomentFamily& family, const MatrixVariable& z, std::size_t j,
                      const FockTruncation& trunc);

/// All n states of a family at Z (closed-form normalization when the family has one).
std::vector<VcsState> build_family_states(const VcsFamily& family, const ComplexMatrix& z,
                                          const FockTruncation& trunc);

/// Deviations of the Z-R admissibility conditions over levels 0..M.
struct ZrConditionReport {
    double moment_deviation = 0.0;  ///< max_m |R R^dagger - rho I| and |R^dagger R - rho I| (relative)
    double power_deviation = 0.0;   ///< max_m |Z^m Z^m^dagger - f^m I| (relative)
    std::size_t worst_level = 0;
};

ZrConditionReport check_zr_conditions(const MomentFamily& family, const ComplexMatrix& z,
                                      std::size_t max_level);

/// Z-R ordering VCS. Requires R R^dagger = R^dagger R = rho(m) I and
/// Z^m Z^m^dagger = f^m I to 1e-10; throws PreconditionError naming the failing level.
VcsState build_vcs_zr(const MomentFamily& family, const ComplexMatrix& z, std::size_t j,
                      const FockTruncation& trunc);

/// The orthogonal-conjugation class: Z = B diag(f_i(z_i)) B^T, R(m) rows rho_i(m) C_i^T.
struct ParticularClass {
    VcsFamily family;
    ComplexMatrix z;
    std::vector<VcsState> states;
    double normalization = 0.0;  ///< sum_m sum_i rho_i(m)^2 |f_i(z_i)|^{2m}
};

ParticularClass build_particular_class(const Eigen::MatrixXd& b,
                                       const std::vector<std::function<Complex(Complex)>>& f,
                                       const std::vector<Complex>& z,
                                       const std::vector<std::function<double(std::size_t)>>& rho,
                                       const FockTruncation& trunc);

/// sum_m <v1_m, v2_m> / sqrt(N1 N2). Throws DimensionError on shape mismatch.
Complex inner_product(const VcsState& s1, const VcsState& s2);

/// sum_k c_k |s_k>, all states rescaled to the normalization of the first.
VcsState superpose(const std::vector<VcsState>& states, const std::vector<Complex>& weights);

/// Pads or trims a state to exactly `levels` stored levels (padding with zeros).
VcsState resize_levels(const VcsState& s, std::size_t levels);

}  // namespace vcs
