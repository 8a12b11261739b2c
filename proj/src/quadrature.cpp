#include "vcs/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "vcs/errors.hpp"

namespace vcs::quad {

void QuadratureConfig::validate() const {
    if (order < 2) throw DomainError("quadrature order must be at least 2");
    if (!(panel_width > 0.0)) throw DomainError("panel_width must be positive");
    if (!(rel_tol > 0.0)) throw DomainError("quadrature rel_tol must be positive");
    if (!(tail_cutoff > 0.0)) throw DomainError("tail_cutoff must be positive");
}

namespace {

GaussLegendreRule make_rule(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

struct Context {
    const RadialIntegrand& f;
    Eigen::Index length;
    std::span<const double> scales;
    const QuadratureConfig& cfg;
    const GaussLegendreRule& rule;
    bool parallel;
};

struct Tally {
    long evaluations = 0;
    double error = 0.0;
    bool converged = true;

    void merge(const Tally& o) {
        evaluations += o.evaluations;
        error += o.error;
        converged = converged && o.converged;
    }
};

Eigen::VectorXd integrate_dim(const Context& ctx, std::size_t dim, std::vector<double>& r, Tally& tally);

// g(t) = F(..., r_dim = sqrt(t), ...) / (2 sqrt(t)), F being f or the inner integral.
void eval_substituted(const Context& ctx, std::size_t dim, std::vector<double>& r, double t,
                      Eigen::Ref<Eigen::VectorXd> out, Tally& tally) {
    const double root = std::sqrt(t);
    r[dim] = root;
    if (dim + 1 == ctx.scales.size()) {
        ctx.f(std::span<const double>(r.data(), r.size()), out);
        ++tally.evaluations;
    } else {
        out = integrate_dim(ctx, dim + 1, r, tally);
    }
    out /= 2.0 * root;
}

Eigen::VectorXd apply_rule(const Context& ctx, std::size_t dim, std::vector<double>& r, double a, double b,
                           Tally& tally) {
    const auto n = static_cast<int>(ctx.rule.nodes.size());
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Eigen::MatrixXd values(ctx.length, n);
    const bool par = ctx.parallel && dim == 0;
    if (par) {
        std::vector<Tally> tallies(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic)
        for (int i = 0; i < n; ++i) {
            std::vector<double> local = r;
            eval_substituted(ctx, dim, local, mid + half * ctx.rule.nodes[static_cast<std::size_t>(i)],
                             values.col(i), tallies[static_cast<std::size_t>(i)]);
        }
        for (const auto& t : tallies) tally.merge(t);
    } else {
        for (int i = 0; i < n; ++i)
            eval_substituted(ctx, dim, r, mid + half * ctx.rule.nodes[static_cast<std::size_t>(i)], values.col(i),
                             tally);
    }
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(ctx.length);
    for (int i = 0; i < n; ++i) sum += ctx.rule.weights[static_cast<std::size_t>(i)] * values.col(i);
    return half * sum;
}

Eigen::VectorXd adapt(const Context& ctx, std::size_t dim, std::vector<double>& r, double a, double b,
                      const Eigen::VectorXd& whole, double floor, double parent_diff, int depth, Tally& tally) {
    const double m = 0.5 * (a + b);
    const Eigen::VectorXd left = apply_rule(ctx, dim, r, a, m, tally);
    const Eigen::VectorXd right = apply_rule(ctx, dim, r, m, b, tally);
    Eigen::VectorXd halves = left + right;
    const double diff = (whole - halves).cwiseAbs().maxCoeff();
    const double scale = std::max(halves.cwiseAbs().maxCoeff(), floor);
    // A smooth integrand gains many digits per split; a difference that does not
    // shrink is rounding noise in the integrand, and splitting further cannot help.
    // Not at t = 0 though: r^p densities are algebraic in t there and converge slowly.
    const bool noise = depth > 0 && a > 0.0 && diff > 0.25 * parent_diff;
    if (diff <= ctx.cfg.rel_tol * scale || noise || depth >= ctx.cfg.max_depth) {
        if (diff > ctx.cfg.rel_tol * scale && !noise) tally.converged = false;
        tally.error += diff;
        return halves;
    }
    return adapt(ctx, dim, r, a, m, left, floor, diff, depth + 1, tally) +
           adapt(ctx, dim, r, m, b, right, floor, diff, depth + 1, tally);
}

Eigen::VectorXd integrate_dim(const Context& ctx, std::size_t dim, std::vector<double>& r, Tally& tally) {
    const double h = ctx.cfg.panel_width * ctx.scales[dim];
    Eigen::VectorXd total = Eigen::VectorXd::Zero(ctx.length);
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k < ctx.cfg.max_panels; ++k) {
        const double a = k * h;
        const double b = (k + 1) * h;
        const Eigen::VectorXd whole = apply_rule(ctx, dim, r, a, b, tally);
        const double floor = std::max(total.cwiseAbs().maxCoeff(), whole.cwiseAbs().maxCoeff());
        const Eigen::VectorXd panel = adapt(ctx, dim, r, a, b, whole, floor, 0.0, 0, tally);
        total += panel;

        const double size = panel.cwiseAbs().maxCoeff();
        if (k >= 2 && size <= previous) {
            const double entry_floor = 1e-14 * total.cwiseAbs().maxCoeff();
            bool negligible = true;
            for (Eigen::Index i = 0; i < ctx.length && negligible; ++i)
                negligible = std::abs(panel(i)) <= ctx.cfg.tail_cutoff * std::max(std::abs(total(i)), entry_floor);
            if (negligible) return total;
        }
        previous = size;
    }
    tally.converged = false;
    return total;
}

}  // namespace

const GaussLegendreRule& gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[order];
    if (!slot) slot = std::make_unique<GaussLegendreRule>(make_rule(order));
    return *slot;
}

IntegrationResult integrate_radial(const RadialIntegrand& f, Eigen::Index length,
                                   std::span<const double> t_scales, const QuadratureConfig& cfg,
                                   Execution exec) {
    cfg.validate();
    if (t_scales.empty()) throw DimensionError("integrate_radial: need at least one coordinate");
    for (double s : t_scales)
        if (!(s > 0.0)) throw DomainError("integrate_radial: t-scales must be positive");
    const Context ctx{f, length, t_scales, cfg, gauss_legendre(cfg.order), exec == Execution::Parallel};
    std::vector<double> r(t_scales.size(), 0.0);
    Tally tally;
    IntegrationResult out;
    out.value = integrate_dim(ctx, 0, r, tally);
    out.evaluations = tally.evaluations;
    out.error_estimate = tally.error;
    out.converged = tally.converged;
    return out;
}

}  // namespace vcs::quad
