#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vcs/parallel.hpp"

namespace vcs::quad {

/// Gauss-Legendre panels on [0, inf) after the substitution t = r^2.
struct QuadratureConfig {
    int order = 12;              ///< nodes per panel
    double panel_width = 10.0;   ///< panel width in t, in units of the coordinate's t-scale
    double rel_tol = 1e-13;      ///< panel vs. its two halves, relative to the largest entry
    double tail_cutoff = 1e-18;  ///< stop once a panel adds less than this, relative, to every entry
    int max_depth = 24;
    int max_panels = 20000;

    void validate() const;
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Newton iteration on Legendre polynomials; cached per order.
const GaussLegendreRule& gauss_legendre(int order);

/// f(r, out) writes a vector of fixed length; r has one entry per radial coordinate.
/// f should vanish like r_i at each origin (the radial Jacobian); without that
/// factor the t = r^2 substitution leaves a t^{-1/2} endpoint singularity.
using RadialIntegrand = std::function<void(std::span<const double>, Eigen::Ref<Eigen::VectorXd>)>;

struct IntegrationResult {
    Eigen::VectorXd value;
    double error_estimate = 0.0;  ///< sum of accepted panel-vs-halves differences
    long evaluations = 0;
    bool converged = true;
};

/// Integrates f over [0, inf)^d, d = t_scales.size(), with nested adaptive
/// panels per coordinate. t_scales[i] sets the panel width for coordinate i
/// (typically the variance-like scale of r_i^2). In the Parallel mode the
/// nodes of each outermost panel are evaluated concurrently.
IntegrationResult integrate_radial(const RadialIntegrand& f, Eigen::Index length,
                                   std::span<const double> t_scales, const QuadratureConfig& cfg,
                                   Execution exec = Execution::Parallel);

}  // namespace vcs::quad
