#include "vcs/oscillator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/rational.hpp>

#include "vcs/errors.hpp"
#include "vcs/families.hpp"

namespace vcs::osc {

namespace {

constexpr double kMaxCondition = 1e12;

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

FockVector zero_like(const FockVector& v) {
    FockVector out;
    out.coefficients = Eigen::MatrixXcd::Zero(v.coefficients.rows(), v.coefficients.cols());
    out.leakage = v.leakage;
    return out;
}

void check_levels(const LadderContext& ctx, const FockVector& v) {
    if (v.components() != ctx.dimension()) throw DimensionError("ladder: component count mismatch");
    if (v.levels() > ctx.max_level() + 1) throw DimensionError("ladder: state has more levels than the context");
}

ComplexVector unit(std::size_t n, std::size_t j) {
    ComplexVector e = ComplexVector::Zero(idx(n));
    e(idx(j)) = 1.0;
    return e;
}

FockVector left_multiply(const ComplexMatrix& m, const FockVector& v) {
    FockVector out = v;
    out.coefficients = m * v.coefficients;
    return out;
}

FockVector subtract(const FockVector& a, const FockVector& b) {
    FockVector out = a;
    out.coefficients -= b.coefficients;
    return out;
}

double max_abs(const FockVector& v) {
    return v.coefficients.size() == 0 ? 0.0 : v.coefficients.cwiseAbs().maxCoeff();
}

using Rational = boost::rational<long long>;
using RationalMatrix = std::array<std::array<Rational, 2>, 2>;

RationalMatrix rational_product(const RationalMatrix& a, const RationalMatrix& b) {
    RationalMatrix c{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return c;
}

double rational_distance(const RationalMatrix& a, const RationalMatrix& b) {
    double d = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) d = std::max(d, std::abs(boost::rational_cast<double>(a[i][j] - b[i][j])));
    return d;
}

}  // namespace

LadderContext::LadderContext(MomentFamily family, std::size_t max_level)
    : family_(std::move(family)), max_level_(max_level) {
    const auto n = idx(family_.dimension);
    if (family_(0) != ComplexMatrix::Identity(n, n))
        throw PreconditionError(family_.name + ": the ladder construction needs R(0) = I", 0);
    x_.assign(max_level_ + 2, ComplexMatrix::Zero(n, n));
    x_inv_.assign(max_level_ + 2, ComplexMatrix::Zero(n, n));
    ComplexMatrix prev = family_(0);
    for (std::size_t m = 1; m <= max_level_ + 1; ++m) {
        const ComplexMatrix cur = family_(m);
        Eigen::JacobiSVD<ComplexMatrix> svd_prev(prev);
        const auto& sp = svd_prev.singularValues();
        if (!(sp(n - 1) > 0.0) || sp(0) / sp(n - 1) > kMaxCondition) {
            std::ostringstream os;
            os << family_.name << ": R(" << m - 1 << ") cannot be inverted";
            throw AlgebraError(os.str(), static_cast<long>(m - 1));
        }
        x_[m] = cur * prev.inverse();
        Eigen::JacobiSVD<ComplexMatrix> svd(x_[m]);
        const auto& s = svd.singularValues();
        if (!(s(n - 1) > 0.0) || s(0) / s(n - 1) > kMaxCondition) {
            std::ostringstream os;
            os << family_.name << ": x_" << m << " is singular or ill-conditioned";
            throw AlgebraError(os.str(), static_cast<long>(m));
        }
        x_inv_[m] = x_[m].inverse();
        prev = cur;
    }
}

const ComplexMatrix& LadderContext::x(std::size_t m) const {
    if (m > max_level_ + 1) throw DimensionError("LadderContext::x: level beyond the cache");
    return x_[m];
}

const ComplexMatrix& LadderContext::x_inv(std::size_t m) const {
    if (m > max_level_ + 1) throw DimensionError("LadderContext::x_inv: level beyond the cache");
    return x_inv_[m];
}

double LadderContext::factorial_deviation() const {
    const auto n = idx(family_.dimension);
    ComplexMatrix fact = ComplexMatrix::Identity(n, n);
    double worst = 0.0;
    for (std::size_t m = 1; m <= max_level_; ++m) {
        fact = x_[m] * fact;
        worst = std::max(worst, (fact - family_(m)).cwiseAbs().maxCoeff());
    }
    return worst;
}

ComplexMatrix elementary(std::size_t n, std::size_t i, std::size_t j) {
    ComplexMatrix e = ComplexMatrix::Zero(idx(n), idx(n));
    e(idx(i), idx(j)) = 1.0;
    return e;
}

double elementary_product_deviation(std::size_t n) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t l = 0; l < n; ++l) {
                    const ComplexMatrix lhs = elementary(n, i, j) * elementary(n, k, l);
                    const ComplexMatrix rhs =
                        j == k ? elementary(n, i, l) : ComplexMatrix::Zero(idx(n), idx(n)).eval();
                    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
                }
    return worst;
}

FockVector basis_vector(std::size_t n, std::size_t levels, std::size_t j, std::size_t m) {
    if (j >= n || m >= levels) throw DimensionError("basis_vector: index out of range");
    FockVector v;
    v.coefficients = Eigen::MatrixXcd::Zero(idx(n), idx(levels));
    v.coefficients(idx(j), idx(m)) = 1.0;
    return v;
}

FockVector apply_annihilation(const LadderContext& ctx, Index k, const FockVector& v) {
    check_levels(ctx, v);
    FockVector out = zero_like(v);
    for (std::size_t m = 1; m < v.levels(); ++m) {
        const auto col = v.coefficients.col(idx(m));
        if (k)
            out.coefficients.col(idx(m - 1)) = col(idx(*k)) * ctx.x_inv(m).col(idx(*k));
        else
            out.coefficients.col(idx(m - 1)) = ctx.x_inv(m) * col;
    }
    return out;
}

FockVector apply_creation(const LadderContext& ctx, Index k, const FockVector& v) {
    check_levels(ctx, v);
    FockVector out = zero_like(v);
    for (std::size_t m = 0; m < v.levels(); ++m) {
        const auto col = v.coefficients.col(idx(m));
        const ComplexVector raised =
            k ? ComplexVector(col(idx(*k)) * ctx.x_inv(m + 1).col(idx(*k))) : ComplexVector(ctx.x_inv(m + 1) * col);
        if (m + 1 < v.levels())
            out.coefficients.col(idx(m + 1)) = raised;
        else
            out.leakage += raised.squaredNorm();
    }
    return out;
}

FockVector apply_number(const LadderContext& ctx, Index k, const FockVector& v) {
    check_levels(ctx, v);
    FockVector out = zero_like(v);
    for (std::size_t m = 1; m < v.levels(); ++m) {
        const ComplexMatrix& xi = ctx.x_inv(m);
        const auto col = v.coefficients.col(idx(m));
        if (k)
            out.coefficients.col(idx(m)) = col(idx(*k)) * xi(idx(*k), idx(*k)) * xi.col(idx(*k));
        else
            out.coefficients.col(idx(m)) = xi * (xi.diagonal().asDiagonal() * col);
    }
    return out;
}

CommutatorCheck commutator_action(const LadderContext& ctx, Commutator which, Index k, Index l,
                                  std::size_t j, std::size_t m, std::size_t levels) {
    if (k.has_value() != l.has_value())
        throw DomainError("commutator_action: give both indices or neither");
    if (m == 0 || m + 2 > levels) throw DomainError("commutator_action: level is not interior");
    const std::size_t n = ctx.dimension();
    const FockVector b = basis_vector(n, levels, j, m);
    CommutatorCheck out;
    switch (which) {
        case Commutator::AAdag:
            out.composed = subtract(apply_annihilation(ctx, k, apply_creation(ctx, l, b)),
                                    apply_creation(ctx, l, apply_annihilation(ctx, k, b)));
            break;
        case Commutator::NA:
            out.composed = subtract(apply_number(ctx, k, apply_annihilation(ctx, l, b)),
                                    apply_annihilation(ctx, l, apply_number(ctx, k, b)));
            break;
        case Commutator::NAdag:
            out.composed = subtract(apply_number(ctx, k, apply_creation(ctx, l, b)),
                                    apply_creation(ctx, l, apply_number(ctx, k, b)));
            break;
    }

    out.closed.coefficients = Eigen::MatrixXcd::Zero(idx(n), idx(levels));
    const ComplexMatrix& xm = ctx.x_inv(m);
    const ComplexMatrix& xp = ctx.x_inv(m + 1);
    const ComplexMatrix& xl = ctx.x_inv(m - 1);
    const ComplexVector ej = unit(n, j);
    if (k) {
        const auto kk = idx(*k);
        const auto ll = idx(*l);
        const double dlj = *l == j ? 1.0 : 0.0;
        const double dkj = *k == j ? 1.0 : 0.0;
        switch (which) {
            case Commutator::AAdag:
                out.closed.coefficients.col(idx(m)) =
                    dlj * xp(kk, ll) * xp.col(kk) - dkj * xm(ll, kk) * xm.col(ll);
                break;
            case Commutator::NA:
                out.closed.coefficients.col(idx(m - 1)) =
                    dlj * xl(kk, kk) * xm(kk, ll) * xl.col(kk) - dkj * xm(ll, kk) * xm(kk, kk) * xm.col(ll);
                break;
            case Commutator::NAdag:
                out.closed.coefficients.col(idx(m + 1)) =
                    xp * (dlj * xp(kk, kk) * xp(kk, ll) * unit(n, *k) - dkj * xm(ll, kk) * xm(kk, kk) * unit(n, *l));
                break;
        }
    } else {
        switch (which) {
            case Commutator::AAdag:
                out.closed.coefficients.col(idx(m)) = (xp * xp - xm * xm) * ej;
                break;
            case Commutator::NA:
                out.closed.coefficients.col(idx(m - 1)) = -(xm * xm - xl * xl) * (xm * ej);
                break;
            case Commutator::NAdag:
                out.closed.coefficients.col(idx(m + 1)) = xp * (xp - xm * xm * ctx.x(m + 1)) * (xp * ej);
                break;
        }
    }
    out.deviation = max_abs(subtract(out.composed, out.closed));
    return out;
}

std::vector<CommutatorTableRow> commutator_table(const LadderContext& ctx, std::size_t max_m) {
    const std::size_t n = ctx.dimension();
    const std::size_t levels = max_m + 2;
    if (levels > ctx.max_level() + 1) throw DimensionError("commutator_table: context too short");
    std::vector<CommutatorTableRow> rows;
    for (std::size_t m = 1; m <= max_m; ++m) {
        CommutatorTableRow row;
        row.m = m;
        for (std::size_t j = 0; j < n; ++j) {
            for (auto which : {Commutator::AAdag, Commutator::NA, Commutator::NAdag}) {
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t l = 0; l < n; ++l)
                        row.indexed_deviation = std::max(
                            row.indexed_deviation, commutator_action(ctx, which, k, l, j, m, levels).deviation);
            }
            row.global_aadag = std::max(
                row.global_aadag,
                commutator_action(ctx, Commutator::AAdag, std::nullopt, std::nullopt, j, m, levels).deviation);
            row.global_na = std::max(
                row.global_na,
                commutator_action(ctx, Commutator::NA, std::nullopt, std::nullopt, j, m, levels).deviation);
            row.global_nadag = std::max(
                row.global_nadag,
                commutator_action(ctx, Commutator::NAdag, std::nullopt, std::nullopt, j, m, levels).deviation);
        }
        rows.push_back(row);
    }
    return rows;
}

bool scalar_quotients(const LadderContext& ctx) {
    const auto n = idx(ctx.dimension());
    for (std::size_t m = 1; m <= ctx.max_level(); ++m) {
        const ComplexMatrix& x = ctx.x(m);
        const Complex c = x(0, 0);
        if ((x - c * ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-14 * std::abs(c)) return false;
    }
    return true;
}

EigenstateResidual eigenstate_residual(const LadderContext& ctx, const ComplexMatrix& z, std::size_t j,
                                       const FockTruncation& trunc) {
    const VcsState s = build_vcs(ctx.family(), z, j, trunc, Ordering::ZR);
    if (s.levels() > ctx.max_level() + 1)
        throw DimensionError("eigenstate_residual: state needs more levels than the context holds");
    const Eigen::MatrixXcd psi = s.normalized();
    double sq = 0.0;
    for (std::size_t m = 0; m + 1 < s.levels(); ++m) {
        const ComplexVector lowered = ctx.x_inv(m + 1) * psi.col(idx(m + 1));
        const ComplexVector scaled = z * psi.col(idx(m));
        sq += (lowered - scaled).squaredNorm();
    }
    return {std::sqrt(sq), s.tail_bound, s.levels()};
}

WorkedExampleIdentities worked_example_identities(std::size_t max_level) {
    if (max_level < 4) throw DomainError("worked_example_identities: need at least 5 levels");
    WorkedExampleIdentities out;
    out.c << 1.5, -0.5, -0.5, 1.5;
    out.d << 2.5, -1.5, -1.5, 2.5;
    out.e << 0.75, 0.25, 0.25, 0.75;

    const RationalMatrix c{{{Rational(3, 2), Rational(-1, 2)}, {Rational(-1, 2), Rational(3, 2)}}};
    const RationalMatrix d{{{Rational(5, 2), Rational(-3, 2)}, {Rational(-3, 2), Rational(5, 2)}}};
    const RationalMatrix e{{{Rational(3, 4), Rational(1, 4)}, {Rational(1, 4), Rational(3, 4)}}};
    const RationalMatrix id{{{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}};
    out.ec_identity = rational_distance(rational_product(e, c), id);
    out.c_squared = rational_distance(rational_product(c, c), d);

    const LadderContext ctx(families::worked_example_family().moments, max_level);
    ComplexMatrix shape(2, 2);
    shape << 3.0, 1.0, 1.0, 3.0;
    for (std::size_t m = 1; m <= max_level; ++m)
        out.x_form = std::max(out.x_form,
                              (ctx.x(m) - shape / (4.0 * std::sqrt(static_cast<double>(m)))).cwiseAbs().maxCoeff());

    const ComplexMatrix cc = out.c.cast<Complex>();
    const ComplexMatrix dd = out.d.cast<Complex>();
    const ComplexMatrix ee = out.e.cast<Complex>();
    const std::size_t levels = max_level + 1;
    auto a_t = [&](const FockVector& v) { return left_multiply(ee, apply_annihilation(ctx, std::nullopt, v)); };
    auto ad_t = [&](const FockVector& v) { return left_multiply(ee, apply_creation(ctx, std::nullopt, v)); };
    auto n_t = [&](const FockVector& v) { return ad_t(a_t(v)); };

    for (std::size_t j = 0; j < 2; ++j) {
        for (std::size_t m = 0; m < levels; ++m) {
            const FockVector b = basis_vector(2, levels, j, m);
            const double sm = std::sqrt(static_cast<double>(m));
            FockVector expect = zero_like(b);
            if (m > 0) expect.coefficients.col(idx(m - 1)) = sm * cc.col(idx(j));
            out.annihilation = std::max(out.annihilation, max_abs(subtract(apply_annihilation(ctx, std::nullopt, b), expect)));
            expect = zero_like(b);
            if (m + 1 < levels) expect.coefficients.col(idx(m + 1)) = std::sqrt(m + 1.0) * cc.col(idx(j));
            out.creation = std::max(out.creation, max_abs(subtract(apply_creation(ctx, std::nullopt, b), expect)));
            expect = zero_like(b);
            expect.coefficients.col(idx(m)) = 1.5 * static_cast<double>(m) * cc.col(idx(j));
            out.number = std::max(out.number, max_abs(subtract(apply_number(ctx, std::nullopt, b), expect)));

            if (m >= 1 && m + 3 <= levels) {
                out.commutator = std::max(
                    out.commutator,
                    max_abs(subtract(
                        commutator_action(ctx, Commutator::AAdag, std::nullopt, std::nullopt, j, m, levels).composed,
                        left_multiply(dd, b))));
                const FockVector tc = subtract(a_t(ad_t(b)), ad_t(a_t(b)));
                out.tilde_commutator = std::max(out.tilde_commutator, max_abs(subtract(tc, b)));
                FockVector na = subtract(n_t(a_t(b)), a_t(n_t(b)));
                na.coefficients += a_t(b).coefficients;
                FockVector nad = subtract(n_t(ad_t(b)), ad_t(n_t(b)));
                nad.coefficients -= ad_t(b).coefficients;
                out.tilde_number = std::max({out.tilde_number, max_abs(na), max_abs(nad)});
                FockVector printed =
                    commutator_action(ctx, Commutator::NA, std::nullopt, std::nullopt, j, m, levels).composed;
                printed.coefficients += dd * apply_annihilation(ctx, std::nullopt, b).coefficients;
                out.printed_na = std::max(out.printed_na, max_abs(printed));
            }
        }
    }
    return out;
}

}  // namespace vcs::osc
