#include "vcs/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vcs/errors.hpp"

namespace vcs::math {

void SpecialFunctionConfig::validate() const {
    if (!(series_tolerance > 0.0)) throw DomainError("series_tolerance must be positive");
    if (max_terms < 1) throw DomainError("max_terms must be at least 1");
}

double trace_gram(const ComplexMatrix& m) { return m.squaredNorm(); }

ComplexMatrix hermitian_modulus(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << "hermitian_modulus: expected a square matrix, got " << m.rows() << "x" << m.cols();
        throw DimensionError(os.str());
    }
    const ComplexMatrix gram = m * m.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram);
    Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
}

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive");
    return std::tgamma(x);
}

double gamma_signed(double x) {
    if (x <= 0.0 && x == std::round(x)) throw PoleError("gamma_signed: pole at non-positive integer");
    return std::tgamma(x);
}

double pochhammer(double a, unsigned n) {
    double p = 1.0;
    for (unsigned k = 0; k < n; ++k) p *= a + k;
    return p;
}

namespace {

bool near_nonpositive_integer(double b, double tol) {
    const double nearest = std::round(b);
    return nearest <= 0.0 && std::abs(b - nearest) <= tol * std::max(1.0, std::abs(b));
}

bool is_nonpositive_integer(double a) { return a <= 0.0 && a == std::round(a); }

// Maclaurin series; x may be negative only when a is a non-positive integer.
double kummer_series(double a, double b, double x, const SpecialFunctionConfig& cfg) {
    double sum = 1.0;
    double term = 1.0;
    const double monotone_from = std::max({-a, -b, 0.0});
    for (std::size_t k = 0; k < cfg.max_terms; ++k) {
        const double kd = static_cast<double>(k);
        if (a + kd == 0.0) return sum;  // polynomial case terminates exactly
        term *= (a + kd) * x / ((b + kd) * (kd + 1.0));
        sum += term;
        const double next = kd + 1.0;
        if (next > monotone_from) {
            const double q = std::abs((a + next) * x / ((b + next) * (next + 1.0)));
            if (q < 0.5) {
                const double tail = std::abs(term) * q / (1.0 - q);
                if (tail <= cfg.series_tolerance * std::abs(sum)) return sum;
            }
        }
        if (!std::isfinite(sum)) break;
    }
    std::ostringstream os;
    os << "kummer_1f1(" << a << ", " << b << ", " << x << "): no convergence within " << cfg.max_terms
       << " terms";
    throw TruncationError(os.str(), std::abs(term));
}

}  // namespace

double kummer_1f1(double a, double b, double x, const SpecialFunctionConfig& cfg) {
    cfg.validate();
    if (near_nonpositive_integer(b, std::max(1e-12, 100.0 * cfg.series_tolerance))) {
        std::ostringstream os;
        os << "kummer_1f1: lower parameter b = " << b << " is a non-positive integer";
        throw PoleError(os.str());
    }
    if (x == 0.0) return 1.0;
    if (x > 0.0 || is_nonpositive_integer(a)) return kummer_series(a, b, x, cfg);
    return std::exp(x) * kummer_series(b - a, b, -x, cfg);
}

SeriesSum sum_positive_series(const std::function<double(std::size_t)>& term, double rel_tol,
                              std::size_t max_index) {
    SeriesSum out;
    double prev = term(0);
    out.value = prev;
    for (std::size_t k = 1; k <= max_index; ++k) {
        const double t = term(k);
        out.value += t;
        out.last_index = k;
        if (!std::isfinite(out.value)) break;
        const double q = prev > 0.0 ? t / prev : 0.0;
        if (q < 0.5) {
            out.tail_bound = t * q / (1.0 - q);
            if (out.tail_bound <= rel_tol * out.value) return out;
        }
        prev = t;
    }
    std::ostringstream os;
    os << "series did not converge within " << max_index << " terms (partial sum " << out.value
       << ", last term " << prev << ")";
    throw ConvergenceError(os.str(), out.value, prev, out.last_index + 1);
}

}  // namespace vcs::math
