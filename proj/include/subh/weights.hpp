#pragma once

#include <functional>
#include <string>
#include <vector>

#include "subh/errors.hpp"

namespace subh {

/// One maximal interval on which the weight keeps a single sign.
/// On the base period shift_ell == 0; J^±_{i,ell} is the same interval
/// translated by ell periods.
struct SignedInterval {
    double lo = 0.0;
    double hi = 0.0;
    int sign = 0;       ///< +1 or -1
    int index_i = 0;    ///< 1..m within its sign class
    int shift_ell = 0;  ///< period shift (0 on the base period)

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    SignedInterval shifted(int ell, double period) const {
        SignedInterval s = *this;
        s.lo += ell * period;
        s.hi += ell * period;
        s.shift_ell = ell;
        return s;
    }
};

/// T-periodic sign-changing weight q(t) = a+(t) - mu * a-(t).
///
/// The base function a(t) is either a sinusoid preset or a piecewise-linear
/// breakpoint table; both are stored once on [0, T] and evaluated modulo T,
/// so extension to [0, kT] is exact. Immutable after construction.
class WeightSpec {
public:
    enum class Kind { sinusoid, table };

    WeightSpec() = default;  // empty spec; build real ones through the factories

    /// a(t) = sin(2*pi*freq*t / period); freq = full sine cycles per period.
    static WeightSpec sinusoid(double period, double mu, double freq, double sign_tol = 1e-10);

    /// Piecewise-linear a(t) through (t_i, v_i); nodes must start at 0 and
    /// end at period.
    static WeightSpec table(double period, double mu, std::vector<double> nodes,
                            std::vector<double> values, double sign_tol = 1e-10);

    Kind kind() const { return kind_; }
    double period() const { return period_; }
    double mu() const { return mu_; }
    double freq() const { return freq_; }
    const std::vector<double>& table_nodes() const { return nodes_; }
    const std::vector<double>& table_values() const { return values_; }

    /// a(t), with t reduced modulo the period.
    double base(double t) const;
    /// q(t) = a+(t) - mu * a-(t).
    double eval(double t) const;
    /// q as a plain callable, for integrators that take coefficient functions.
    std::function<double(double)> coefficient() const;
    /// Extended-precision q(t) for the verification integrations.
    std::function<long double(long double)> coefficient_hp() const;

    /// Humps on [0, T], in increasing lo order, alternating in sign.
    /// Empty when the weight never changes sign.
    const std::vector<SignedInterval>& humps() const { return humps_; }
    bool sign_changing() const { return !humps_.empty(); }
    int num_positive_humps() const { return m_; }

    /// J^+_{i,ell} = I^+_i + ell*T   (index_i is 1-based).
    SignedInterval positive_hump(int index_i, int shift_ell = 0) const;

    /// All hump boundary points (shifted copies included) inside [t0, t1];
    /// used to split quadrature at the kinks of q.
    std::vector<double> hump_boundaries_on(double t0, double t1) const;

private:
    Kind kind_ = Kind::sinusoid;
    double period_ = 1.0;
    double mu_ = 1.0;
    double freq_ = 1.0;                // sinusoid only
    std::vector<double> nodes_;        // table only
    std::vector<double> values_;       // table only
    std::vector<SignedInterval> humps_;
    int m_ = 0;
};

/// q(t) = a+(t) - mu * a-(t), t reduced mod T.
double eval_weight(const WeightSpec& w, double t);

/// Locate the sign structure of the weight on [0, T].
/// Throws NoSignChangeError when the weight has a single sign (hypothesis
/// (q_*) fails and the solver must refuse).
std::vector<SignedInterval> decompose_humps(const WeightSpec& w, double sign_tol = 1e-10);

/// Integral of q over [0, kT]. Adaptive quadrature split at hump boundaries;
/// exact trapezoid for table weights.
double mean_value(const WeightSpec& w, int k);

/// mu^# = (integral of a+) / (integral of a-) over one period.
/// Throws DefiniteWeightError when the negative part vanishes.
double mu_sharp(const WeightSpec& w);

}  // namespace subh
