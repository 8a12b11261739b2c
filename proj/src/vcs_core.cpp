#include "vcs/vcs_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "vcs/errors.hpp"

namespace vcs {

namespace {

constexpr double kMachineSeriesTol = 1e-17;
constexpr double kDriftResync = 1e-10;
constexpr double kZrConditionTol = 1e-10;

ComplexMatrix identity(std::size_t n) {
    return ComplexMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

// Lazily computes P_m = R(m) Z^m (or Z^m R(m)) in order, caching every P_m.
// The running power is compared with binary exponentiation at m = 8 and 64
// and resynchronised when it has drifted.
class PowerSequence {
public:
    PowerSequence(const MomentFamily& family, const ComplexMatrix& z, Ordering ordering)
        : family_(family), z_(z), ordering_(ordering), power_(identity(family.dimension)) {}

    const ComplexMatrix& product(std::size_t m) {
        while (products_.size() <= m) advance();
        return products_[m];
    }

    double trace_term(std::size_t m) { return product(m).squaredNorm(); }
    double drift() const { return drift_; }

private:
    void advance() {
        const std::size_t m = products_.size();
        if (m > 0) power_ = power_ * z_;
        if (m == 8 || m == 64) {
            const ComplexMatrix direct = matrix_power(z_, m);
            const double scale = std::max(direct.norm(), std::numeric_limits<double>::min());
            const double rel = (power_ - direct).norm() / scale;
            drift_ = std::max(drift_, rel);
            if (rel > kDriftResync) power_ = direct;
        }
        const ComplexMatrix r = family_(m);
        products_.push_back(ordering_ == Ordering::RZ ? ComplexMatrix(r * power_)
                                                      : ComplexMatrix(power_ * r));
    }

    const MomentFamily& family_;
    const ComplexMatrix& z_;
    Ordering ordering_;
    ComplexMatrix power_;
    std::vector<ComplexMatrix> products_;
    double drift_ = 0.0;
};

void check_square(const ComplexMatrix& z, std::size_t n, const char* where) {
    if (z.rows() != z.cols() || static_cast<std::size_t>(z.rows()) != n) {
        std::ostringstream os;
        os << where << ": Z is " << z.rows() << "x" << z.cols() << ", family dimension is " << n;
        throw DimensionError(os.str());
    }
}

}  // namespace

void FockTruncation::validate() const {
    if (n_components < 1) throw DomainError("FockTruncation: n_components must be positive");
    if (level_cutoff < 1) throw DomainError("FockTruncation: level_cutoff must be positive");
    if (!(tail_tolerance > 0.0)) throw DomainError("FockTruncation: tail_tolerance must be positive");
}

void MomentFamily::check_flags(std::size_t up_to) const {
    const auto n = static_cast<Eigen::Index>(dimension);
    if (r0_identity) {
        const ComplexMatrix r0 = generator(0);
        if (r0.rows() != n || r0.cols() != n || r0 != ComplexMatrix::Identity(n, n))
            throw PreconditionError(name + ": R(0) is not the identity", 0);
    }
    if (invertible_all_m) {
        for (std::size_t m = 0; m <= up_to; ++m) {
            Eigen::JacobiSVD<ComplexMatrix> svd(generator(m));
            const auto& s = svd.singularValues();
            const double smin = s(s.size() - 1);
            if (!(smin > 0.0) || s(0) / smin > 1e12) {
                std::ostringstream os;
                os << name << ": R(" << m << ") is singular or ill-conditioned";
                throw PreconditionError(os.str(), static_cast<long>(m));
            }
        }
    }
}

ComplexMatrix MatrixVariable::value() const { return amplitude * std::polar(1.0, phase); }

double VcsState::squared_norm() const { return coefficients.squaredNorm() / normalization; }

Eigen::MatrixXcd VcsState::normalized() const { return coefficients / std::sqrt(normalization); }

ComplexMatrix matrix_power(const ComplexMatrix& z, std::size_t p) {
    ComplexMatrix result = ComplexMatrix::Identity(z.rows(), z.cols());
    ComplexMatrix base = z;
    while (p > 0) {
        if (p & 1U) result = result * base;
        p >>= 1U;
        if (p > 0) base = base * base;
    }
    return result;
}

math::SeriesSum normalization_series(const MomentFamily& family, const ComplexMatrix& z,
                                     Ordering ordering, double rel_tol, std::size_t max_level) {
    check_square(z, family.dimension, "normalization_series");
    PowerSequence seq(family, z, ordering);
    return math::sum_positive_series([&](std::size_t m) { return seq.trace_term(m); }, rel_tol,
                                     max_level);
}

math::SeriesSum normalization_rz(const MomentFamily& family, const ComplexMatrix& amplitude,
                                 const FockTruncation& trunc) {
    trunc.validate();
    return normalization_series(family, amplitude, Ordering::RZ, kMachineSeriesTol,
                                trunc.level_cutoff);
}

VcsState build_vcs(const MomentFamily& family, const ComplexMatrix& z, std::size_t j,
                   const FockTruncation& trunc, Ordering ordering, std::optional<double> normalization) {
    trunc.validate();
    const std::size_t n = family.dimension;
    check_square(z, n, "build_vcs");
    if (trunc.n_components != n) throw DimensionError("build_vcs: truncation n_components mismatch");
    if (j >= n) throw DimensionError("build_vcs: component index out of range");

    PowerSequence seq(family, z, ordering);
    auto term = [&](std::size_t m) { return seq.trace_term(m); };
    const math::SeriesSum kept = math::sum_positive_series(term, trunc.tail_tolerance, trunc.level_cutoff);

    double big_n = 0.0;
    if (normalization) {
        big_n = *normalization;
    } else {
        big_n = math::sum_positive_series(term, kMachineSeriesTol, trunc.level_cutoff).value;
    }
    if (!(big_n > 0.0) || !std::isfinite(big_n))
        throw ConvergenceError("build_vcs: normalization is not finite and positive", big_n, 0.0,
                               kept.last_index + 1);

    VcsState s;
    s.truncation = trunc;
    s.truncation.n_components = n;
    s.coefficients.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kept.last_index + 1));
    for (std::size_t m = 0; m <= kept.last_index; ++m)
        s.coefficients.col(static_cast<Eigen::Index>(m)) = seq.product(m).col(static_cast<Eigen::Index>(j));
    s.normalization = big_n;
    s.tail_bound = kept.tail_bound / big_n;
    s.power_drift = seq.drift();
    s.component = j;
    return s;
}

VcsState build_vcs_rz(const MomentFamily& family, const MatrixVariable& z, std::size_t j,
                      const FockTruncation& trunc) {
    return build_vcs(family, z.value(), j, trunc, Ordering::RZ);
}

std::vector<VcsState> build_family_states(const VcsFamily& family, const ComplexMatrix& z,
                                          const FockTruncation& trunc) {
    std::optional<double> big_n;
    if (family.closed_form_normalization) big_n = family.closed_form_normalization(z);
    std::vector<VcsState> out;
    out.reserve(family.dimension());
    for (std::size_t j = 0; j < family.dimension(); ++j) {
        if (family.ordering == Ordering::ZR && !big_n)
            out.push_back(build_vcs_zr(family.moments, z, j, trunc));
        else
            out.push_back(build_vcs(family.moments, z, j, trunc, family.ordering, big_n));
    }
    return out;
}

ZrConditionReport check_zr_conditions(const MomentFamily& family, const ComplexMatrix& z,
                                      std::size_t max_level) {
    const std::size_t n = family.dimension;
    check_square(z, n, "check_zr_conditions");
    const ComplexMatrix id = identity(n);
    ZrConditionReport rep;
    ComplexMatrix power = id;
    double f1 = 0.0;
    for (std::size_t m = 0; m <= max_level; ++m) {
        if (m > 0) power = power * z;
        const ComplexMatrix r = family(m);
        const ComplexMatrix rr = r * r.adjoint();
        const double rho = rr.trace().real() / static_cast<double>(n);
        if (rho > 0.0) {
            const double dev = std::max((rr - rho * id).cwiseAbs().maxCoeff(),
                                        (r.adjoint() * r - rho * id).cwiseAbs().maxCoeff()) /
                               rho;
            if (dev > rep.moment_deviation) {
                rep.moment_deviation = dev;
                rep.worst_level = m;
            }
        }
        const ComplexMatrix zz = power * power.adjoint();
        const double c = zz.trace().real() / static_cast<double>(n);
        if (m == 1) f1 = c;
        if (c > 0.0) {
            double dev = std::max((zz - c * id).cwiseAbs().maxCoeff(),
                                  (power.adjoint() * power - c * id).cwiseAbs().maxCoeff()) /
                         c;
            if (m > 1) dev = std::max(dev, std::abs(c - std::pow(f1, static_cast<double>(m))) / c);
            if (dev > rep.power_deviation) {
                rep.power_deviation = dev;
                if (dev > rep.moment_deviation) rep.worst_level = m;
            }
        }
    }
    return rep;
}

VcsState build_vcs_zr(const MomentFamily& family, const ComplexMatrix& z, std::size_t j,
                      const FockTruncation& trunc) {
    VcsState s = build_vcs(family, z, j, trunc, Ordering::ZR);
    const ZrConditionReport rep = check_zr_conditions(family, z, s.levels() - 1);
    if (rep.moment_deviation > kZrConditionTol || rep.power_deviation > kZrConditionTol) {
        std::ostringstream os;
        os << "build_vcs_zr: Z-R conditions violated at level " << rep.worst_level
           << " (moment deviation " << rep.moment_deviation << ", power deviation "
           << rep.power_deviation << ")";
        throw PreconditionError(os.str(), static_cast<long>(rep.worst_level));
    }
    return s;
}

VcsState build_scalar_cs(const std::function<double(std::size_t)>& rho, Complex z,
                         const FockTruncation& trunc) {
    MomentFamily fam;
    fam.name = "scalar";
    fam.dimension = 1;
    fam.generator = [rho](std::size_t m) {
        ComplexMatrix r(1, 1);
        r(0, 0) = 1.0 / std::sqrt(rho(m));
        return r;
    };
    ComplexMatrix zm(1, 1);
    zm(0, 0) = z;
    FockTruncation t = trunc;
    t.n_components = 1;
    return build_vcs(fam, zm, 0, t, Ordering::RZ);
}

ParticularClass build_particular_class(const Eigen::MatrixXd& b,
                                       const std::vector<std::function<Complex(Complex)>>& f,
                                       const std::vector<Complex>& z,
                                       const std::vector<std::function<double(std::size_t)>>& rho,
                                       const FockTruncation& trunc) {
    const auto n = static_cast<std::size_t>(b.rows());
    if (b.rows() != b.cols()) throw DimensionError("build_particular_class: B must be square");
    if (f.size() != n || z.size() != n || rho.size() != n)
        throw DimensionError("build_particular_class: need one f_i, z_i and rho_i per component");
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(b.rows(), b.cols());
    const double orth = std::max((b * b.transpose() - id).cwiseAbs().maxCoeff(),
                                 (b.transpose() * b - id).cwiseAbs().maxCoeff());
    if (orth > 1e-12) {
        std::ostringstream os;
        os << "build_particular_class: B is not orthogonal (deviation " << orth << ")";
        throw PreconditionError(os.str());
    }

    const ComplexMatrix bc = b.cast<Complex>();
    ParticularClass pc;
    pc.family.moments.name = "particular-class";
    pc.family.moments.dimension = n;
    pc.family.moments.generator = [bc, rho, n](std::size_t m) {
        Eigen::VectorXcd d(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) d(static_cast<Eigen::Index>(i)) = rho[i](m);
        return ComplexMatrix(d.asDiagonal() * bc.transpose());
    };
    pc.family.ordering = Ordering::RZ;
    pc.family.radial_dims = n;
    pc.family.amplitude = [bc, f, n](std::span<const double> r) {
        Eigen::VectorXcd d(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) d(static_cast<Eigen::Index>(i)) = f[i](Complex(r[i], 0.0));
        return ComplexMatrix(bc * d.asDiagonal() * bc.transpose());
    };
    const std::size_t cap = trunc.level_cutoff;
    // Componentwise route: sum_i sum_m rho_i(m)^2 |f_i|^{2m}, reading f_i off B^T Z B.
    pc.family.closed_form_normalization = [bc, rho, n, cap](const ComplexMatrix& zz) {
        const ComplexMatrix d = bc.transpose() * zz * bc;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a2 = std::norm(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
            total += math::sum_positive_series(
                         [&](std::size_t m) {
                             const double r = rho[i](m);
                             return r * r * std::pow(a2, static_cast<double>(m));
                         },
                         kMachineSeriesTol, cap)
                         .value;
        }
        return total;
    };

    Eigen::VectorXcd fd(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) fd(static_cast<Eigen::Index>(i)) = f[i](z[i]);
    pc.z = bc * fd.asDiagonal() * bc.transpose();
    pc.normalization = pc.family.closed_form_normalization(pc.z);
    FockTruncation t = trunc;
    t.n_components = n;
    pc.states = build_family_states(pc.family, pc.z, t);
    return pc;
}

Complex inner_product(const VcsState& s1, const VcsState& s2) {
    if (s1.components() != s2.components() || s1.levels() != s2.levels()) {
        std::ostringstream os;
        os << "inner_product: shapes differ (" << s1.components() << "x" << s1.levels() << " vs "
           << s2.components() << "x" << s2.levels() << ")";
        throw DimensionError(os.str());
    }
    const Complex raw = (s1.coefficients.adjoint() * s2.coefficients).trace();
    return raw / std::sqrt(s1.normalization * s2.normalization);
}

VcsState resize_levels(const VcsState& s, std::size_t levels) {
    VcsState out = s;
    const auto old = static_cast<Eigen::Index>(s.levels());
    const auto now = static_cast<Eigen::Index>(levels);
    out.coefficients = Eigen::MatrixXcd::Zero(s.coefficients.rows(), now);
    const Eigen::Index keep = std::min(old, now);
    out.coefficients.leftCols(keep) = s.coefficients.leftCols(keep);
    return out;
}

VcsState superpose(const std::vector<VcsState>& states, const std::vector<Complex>& weights) {
    if (states.empty() || states.size() != weights.size())
        throw DimensionError("superpose: need one weight per state");
    std::size_t levels = 0;
    for (const auto& s : states) {
        if (s.components() != states.front().components())
            throw DimensionError("superpose: component counts differ");
        levels = std::max(levels, s.levels());
    }
    VcsState out = resize_levels(states.front(), levels);
    out.coefficients.setZero();
    out.component.reset();
    const double n0 = states.front().normalization;
    for (std::size_t k = 0; k < states.size(); ++k) {
        const VcsState sk = resize_levels(states[k], levels);
        out.coefficients += weights[k] * std::sqrt(n0 / sk.normalization) * sk.coefficients;
        out.tail_bound = std::max(out.tail_bound, sk.tail_bound);
        out.power_drift = std::max(out.power_drift, sk.power_drift);
    }
    return out;
}

}  // namespace vcs
