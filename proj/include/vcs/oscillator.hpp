#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vcs/vcs_core.hpp"

namespace vcs::osc {

/// x_m = R(m) R(m-1)^{-1} and its inverse for m = 1..max_level+1, cached.
/// By convention x_0^{-1} = 0, so the number operator kills level 0.
class LadderContext {
public:
    /// Throws PreconditionError unless R(0) = I, and AlgebraError naming m when
    /// x_m is singular or its condition number exceeds 1e12.
    LadderContext(MomentFamily family, std::size_t max_level);

    std::size_t dimension() const { return family_.dimension; }
    std::size_t max_level() const { return max_level_; }
    const MomentFamily& family() const { return family_; }

    const ComplexMatrix& x(std::size_t m) const;
    const ComplexMatrix& x_inv(std::size_t m) const;

    /// max over m of |x_m x_{m-1} ... x_1 - R(m)|.
    double factorial_deviation() const;

private:
    MomentFamily family_;
    std::size_t max_level_;
    std::vector<ComplexMatrix> x_;
    std::vector<ComplexMatrix> x_inv_;
};

/// Elementary matrix E_ij of size n (zero-based indices).
ComplexMatrix elementary(std::size_t n, std::size_t i, std::size_t j);

/// max over all index quadruples of |E_ij E_kl - delta_jk E_il|.
double elementary_product_deviation(std::size_t n);

/// Which operator: the indexed A_k (k given) or the global sum (k empty).
using Index = std::optional<std::size_t>;

/// chi^j (x) phi_m in a stack with the given number of levels.
FockVector basis_vector(std::size_t n, std::size_t levels, std::size_t j, std::size_t m);

FockVector apply_annihilation(const LadderContext& ctx, Index k, const FockVector& v);
/// Creation out of the last stored level is dropped; its squared norm goes to leakage.
FockVector apply_creation(const LadderContext& ctx, Index k, const FockVector& v);
FockVector apply_number(const LadderContext& ctx, Index k, const FockVector& v);

enum class Commutator { AAdag, NA, NAdag };

struct CommutatorCheck {
    FockVector composed;  ///< left side by operator composition
    FockVector closed;    ///< right side by the closed form
    double deviation = 0.0;
};

/// [A_k, A_l^dagger], [N_k, A_l], [N_k, A_l^dagger] on chi^j (x) phi_m when k, l are
/// given, or the global versions when both are empty. Interior levels only.
CommutatorCheck commutator_action(const LadderContext& ctx, Commutator which, Index k, Index l,
                                  std::size_t j, std::size_t m, std::size_t levels);

/// Largest commutator deviation over all index combinations and levels 1..max_m.
struct CommutatorTableRow {
    std::size_t m = 0;
    double indexed_deviation = 0.0;    ///< all three indexed commutators, all k, l, j
    double global_aadag = 0.0;
    double global_na = 0.0;
    double global_nadag = 0.0;
};

std::vector<CommutatorTableRow> commutator_table(const LadderContext& ctx, std::size_t max_m);

/// True when every x_m (m <= max_level) is a multiple of the identity to 1e-14.
bool scalar_quotients(const LadderContext& ctx);

/// max over levels 0..M-1 of |(A psi)_m - (Z psi)_m| for the normalized Z-R state
/// |Z, j>. Levels up to M+1 are built so that A psi at level M-1 is exact.
struct EigenstateResidual {
    double residual = 0.0;
    double tail_bound = 0.0;
    std::size_t levels = 0;
};

EigenstateResidual eigenstate_residual(const LadderContext& ctx, const ComplexMatrix& z, std::size_t j,
                                       const FockTruncation& trunc);

/// The 2x2 matrices C, D, E of the worked example and the derived identities.
struct WorkedExampleIdentities {
    Eigen::Matrix2d c;
    Eigen::Matrix2d d;
    Eigen::Matrix2d e;
    double x_form = 0.0;        ///< max_m |x_m - (1/(4 sqrt m)) [[3,1],[1,3]]|
    double annihilation = 0.0;  ///< |A - C (x) a| on all basis vectors
    double creation = 0.0;      ///< |A^dagger - C (x) a^dagger|
    double number = 0.0;        ///< |N - (3/2) C (x) n|
    double commutator = 0.0;    ///< |[A, A^dagger] - D (x) I| on interior levels
    double ec_identity = 0.0;   ///< |E C - I|, exact in rationals
    double c_squared = 0.0;     ///< |C^2 - D|, exact in rationals
    double tilde_commutator = 0.0;  ///< |[EA, EA^dagger] - I|
    double tilde_number = 0.0;      ///< |[N~, A~] + A~| and |[N~, A~^dagger] - A~^dagger|
    double printed_na = 0.0;    ///< |[N, A] + D A| (stated relation, diagnostic only)
};

WorkedExampleIdentities worked_example_identities(std::size_t max_level);

}  // namespace vcs::osc
