#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vcs/parallel.hpp"
#include "vcs/quadrature.hpp"
#include "vcs/vcs_core.hpp"

namespace vcs::audit {

/// Radial part of a measure on the label space. The angular integrals are
/// applied analytically: each independent phase contributes 2 pi and kills the
/// cross terms between different levels, which is folded into angular_factor.
struct RadialMeasure {
    std::string name;
    std::size_t dims = 1;
    /// Radial density. When includes_normalization is set it already equals
    /// W(|Z|) N(|Z|)^{-1} times the radial factor of d nu (N cancelled by hand);
    /// otherwise it is W times the radial factor and the audit divides by N.
    std::function<double(std::span<const double>)> density;
    bool includes_normalization = true;
    double angular_factor = 1.0;
    std::vector<double> t_scales;  ///< one per radial coordinate, see integrate_radial
    quad::QuadratureConfig quadrature;

    void validate() const;
    /// Smallest density value on a coarse grid of [0, 6 sqrt(t_scale)]^dims.
    double sampled_minimum(std::size_t points_per_dim = 25) const;
};

/// [P_m][P_m]^dagger with P_m = R(m) A^m (R-Z) or A^m R(m) (Z-R).
ComplexMatrix moment_matrix(const VcsFamily& family, const ComplexMatrix& amplitude, std::size_t m);

struct MomentAudit {
    std::size_t m = 0;
    ComplexMatrix value;           ///< the integrated n x n matrix
    double deviation = 0.0;        ///< max |value - I|
    double doubling_change = 0.0;  ///< max change when the node count per panel is doubled
    double error_estimate = 0.0;
    bool converged = true;
    bool pass = false;
};

/// Audits level m alone. This is the serial reference path: one integrand per
/// call, no stacking, no threads.
MomentAudit audit_moment(const VcsFamily& family, const RadialMeasure& measure, std::size_t m, double tol);

/// Audits levels 0..max_m in one stacked integration (all levels share nodes).
std::vector<MomentAudit> audit_moments(const VcsFamily& family, const RadialMeasure& measure,
                                       std::size_t max_m, double tol,
                                       Execution exec = Execution::Parallel);

struct ResolutionReport {
    std::vector<MomentAudit> blocks;
    /// max |O - I| over the assembled n(M+1) x n(M+1) truncated operator
    double deviation = 0.0;
    double max_block_deviation = 0.0;
    std::size_t worst_level = 0;
    bool pass = false;
};

/// Assembles the truncated resolution operator from the per-level blocks
/// (block diagonal after the angular reduction) and compares it to identity.
ResolutionReport audit_resolution(const VcsFamily& family, const RadialMeasure& measure,
                                  std::size_t max_level, double tol,
                                  Execution exec = Execution::Parallel);

}  // namespace vcs::audit
