#pragma once

#include <complex>
#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace vcs {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace math {

struct SpecialFunctionConfig {
    double series_tolerance = 1e-14;
    std::size_t max_terms = 10000;

    /// Throws DomainError unless series_tolerance > 0 and max_terms >= 1.
    void validate() const;
};

/// Tr(M^dagger M), i.e. the squared Frobenius norm.
double trace_gram(const ComplexMatrix& m);

/// Positive-semidefinite square root of M M^dagger, |M| = [M M^dagger]^{1/2}.
/// Tiny negative eigenvalues produced by rounding are clamped to zero.
ComplexMatrix hermitian_modulus(const ComplexMatrix& m);

/// Gamma function for x > 0.
double gamma_fn(double x);

/// Gamma function on the whole real line except the poles 0, -1, -2, ...
/// Used where parameter constraints involve negative arguments.
double gamma_signed(double x);

/// Rising factorial (a)_n = a (a+1) ... (a+n-1), evaluated as a product.
double pochhammer(double a, unsigned n);

/// Confluent hypergeometric 1F1(a; b; x) for real arguments.
///
/// For x >= 0 the Maclaurin series is summed until a ratio-certified tail bound
/// falls below cfg.series_tolerance relative to the partial sum. For x < 0 the
/// Kummer transformation 1F1(a;b;x) = e^x 1F1(b-a;b;-x) is applied first.
/// Throws PoleError when b is within tolerance of a non-positive integer and
/// TruncationError when max_terms is exhausted.
double kummer_1f1(double a, double b, double x, const SpecialFunctionConfig& cfg = {});

/// Result of summing a series of nonnegative terms with a certified tail.
struct SeriesSum {
    double value = 0.0;       ///< partial sum over terms [0, last_index]
    double tail_bound = 0.0;  ///< upper bound on the dropped terms
    std::size_t last_index = 0;
};

/// Sums t(0) + t(1) + ... of nonnegative terms. Stops once the term ratio has
/// dropped below 1/2 and the geometric tail bound t_k q / (1 - q) is at most
/// rel_tol times the partial sum. Throws ConvergenceError at max_index.
SeriesSum sum_positive_series(const std::function<double(std::size_t)>& term, double rel_tol,
                              std::size_t max_index);

}  // namespace math
}  // namespace vcs
