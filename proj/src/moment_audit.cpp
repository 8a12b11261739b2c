#include "vcs/moment_audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vcs/errors.hpp"

namespace vcs::audit {

namespace {

double normalization_at(const VcsFamily& family, const ComplexMatrix& a) {
    if (family.closed_form_normalization) return family.closed_form_normalization(a);
    return normalization_series(family.moments, a, family.ordering, 1e-17, 512).value;
}

// Integrates levels [m_lo, m_hi] stacked; returns one n x n matrix per level.
struct StackedResult {
    std::vector<ComplexMatrix> values;
    double error = 0.0;
    bool converged = true;
};

StackedResult integrate_levels(const VcsFamily& family, const RadialMeasure& measure, std::size_t m_lo,
                               std::size_t m_hi, const quad::QuadratureConfig& cfg, Execution exec) {
    const auto n = static_cast<Eigen::Index>(family.dimension());
    const std::size_t count = m_hi - m_lo + 1;
    const Eigen::Index block = 2 * n * n;
    std::vector<ComplexMatrix> moments;
    moments.reserve(count);
    for (std::size_t m = m_lo; m <= m_hi; ++m) moments.push_back(family.moments(m));

    auto integrand = [&](std::span<const double> r, Eigen::Ref<Eigen::VectorXd> out) {
        double w = measure.density(r);
        if (w == 0.0) {
            out.setZero();
            return;
        }
        const ComplexMatrix a = family.amplitude(r);
        if (!measure.includes_normalization) w /= normalization_at(family, a);
        ComplexMatrix power = m_lo == 0 || family.moment_product ? ComplexMatrix::Identity(n, n)
                                                                 : matrix_power(a, m_lo);
        // buffers reused across levels; this loop dominates the audit cost
        ComplexMatrix next(n, n);
        ComplexMatrix p(n, n);
        ComplexMatrix pp(n, n);
        for (std::size_t k = 0; k < count; ++k) {
            if (family.moment_product) {
                p = family.moment_product(m_lo + k, r);
            } else {
                if (k > 0) {
                    next.noalias() = power * a;
                    power.swap(next);
                }
                if (family.ordering == Ordering::RZ)
                    p.noalias() = moments[k] * power;
                else
                    p.noalias() = power * moments[k];
            }
            pp.noalias() = p * p.adjoint();
            const Eigen::Index base = static_cast<Eigen::Index>(k) * block;
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) {
                    out(base + 2 * (i * n + j)) = w * pp(i, j).real();
                    out(base + 2 * (i * n + j) + 1) = w * pp(i, j).imag();
                }
        }
    };

    const quad::IntegrationResult res = quad::integrate_radial(
        integrand, static_cast<Eigen::Index>(count) * block, measure.t_scales, cfg, exec);
    StackedResult out;
    out.error = res.error_estimate * measure.angular_factor;
    out.converged = res.converged;
    for (std::size_t k = 0; k < count; ++k) {
        ComplexMatrix v(n, n);
        const Eigen::Index base = static_cast<Eigen::Index>(k) * block;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                v(i, j) = Complex(res.value(base + 2 * (i * n + j)), res.value(base + 2 * (i * n + j) + 1));
        out.values.push_back(measure.angular_factor * v);
    }
    return out;
}

std::vector<MomentAudit> run_audit(const VcsFamily& family, const RadialMeasure& measure, std::size_t m_lo,
                                   std::size_t m_hi, double tol, Execution exec) {
    measure.validate();
    if (measure.dims != family.radial_dims)
        throw DimensionError("audit: measure and family disagree on the number of radial coordinates");
    if (!(tol > 0.0)) throw DomainError("audit: tolerance must be positive");

    quad::QuadratureConfig fine = measure.quadrature;
    fine.order *= 2;
    const StackedResult coarse = integrate_levels(family, measure, m_lo, m_hi, measure.quadrature, exec);
    const StackedResult refined = integrate_levels(family, measure, m_lo, m_hi, fine, exec);

    const auto n = static_cast<Eigen::Index>(family.dimension());
    std::vector<MomentAudit> out;
    for (std::size_t k = 0; k + m_lo <= m_hi; ++k) {
        MomentAudit a;
        a.m = m_lo + k;
        a.value = refined.values[k];
        a.deviation = (a.value - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
        a.doubling_change = (refined.values[k] - coarse.values[k]).cwiseAbs().maxCoeff();
        a.error_estimate = refined.error;
        a.converged = coarse.converged && refined.converged;
        a.pass = a.converged && a.deviation <= tol && a.doubling_change < tol / 10.0;
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace

void RadialMeasure::validate() const {
    if (dims < 1) throw DomainError("RadialMeasure: need at least one radial coordinate");
    if (t_scales.size() != dims) throw DimensionError("RadialMeasure: one t-scale per radial coordinate");
    if (!density) throw DomainError("RadialMeasure: density is not set");
    if (!(angular_factor > 0.0)) throw DomainError("RadialMeasure: angular factor must be positive");
    quadrature.validate();
}

double RadialMeasure::sampled_minimum(std::size_t points_per_dim) const {
    validate();
    std::vector<double> r(dims, 0.0);
    std::vector<std::size_t> idx(dims, 0);
    double lowest = std::numeric_limits<double>::infinity();
    while (true) {
        for (std::size_t d = 0; d < dims; ++d)
            r[d] = 6.0 * std::sqrt(t_scales[d]) * static_cast<double>(idx[d]) /
                   static_cast<double>(points_per_dim - 1);
        lowest = std::min(lowest, density(std::span<const double>(r.data(), r.size())));
        std::size_t d = 0;
        while (d < dims && ++idx[d] == points_per_dim) idx[d++] = 0;
        if (d == dims) break;
    }
    return lowest;
}

ComplexMatrix moment_matrix(const VcsFamily& family, const ComplexMatrix& amplitude, std::size_t m) {
    const ComplexMatrix power = matrix_power(amplitude, m);
    const ComplexMatrix r = family.moments(m);
    const ComplexMatrix p = family.ordering == Ordering::RZ ? ComplexMatrix(r * power) : ComplexMatrix(power * r);
    return p * p.adjoint();
}

MomentAudit audit_moment(const VcsFamily& family, const RadialMeasure& measure, std::size_t m, double tol) {
    return run_audit(family, measure, m, m, tol, Execution::Serial).front();
}

std::vector<MomentAudit> audit_moments(const VcsFamily& family, const RadialMeasure& measure,
                                       std::size_t max_m, double tol, Execution exec) {
    return run_audit(family, measure, 0, max_m, tol, exec);
}

ResolutionReport audit_resolution(const VcsFamily& family, const RadialMeasure& measure,
                                  std::size_t max_level, double tol, Execution exec) {
    ResolutionReport rep;
    rep.blocks = audit_moments(family, measure, max_level, tol, exec);
    const auto n = static_cast<Eigen::Index>(family.dimension());
    const auto levels = static_cast<Eigen::Index>(max_level + 1);
    ComplexMatrix op = ComplexMatrix::Zero(n * levels, n * levels);
    for (const auto& b : rep.blocks) op.block(static_cast<Eigen::Index>(b.m) * n, static_cast<Eigen::Index>(b.m) * n, n, n) = b.value;
    rep.deviation = (op - ComplexMatrix::Identity(n * levels, n * levels)).cwiseAbs().maxCoeff();
    rep.pass = true;
    for (const auto& b : rep.blocks) {
        if (b.deviation > rep.max_block_deviation) {
            rep.max_block_deviation = b.deviation;
            rep.worst_level = b.m;
        }
        rep.pass = rep.pass && b.pass;
    }
    return rep;
}

}  // namespace vcs::audit
