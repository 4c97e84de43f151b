#pragma once

// Special-function kernels: confluent hypergeometric 1F1, generalized
// Laguerre polynomials and the local biconfluent Heun solution H_B.

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pdm/errors.hpp"
#include "pdm/jet.hpp"

namespace pdm {

/// Kummer's M(a, b, x). Terminating (a = -n) input is summed exactly in
/// extended precision; otherwise the power series is summed until the
/// relative tail bound drops below 1e-16 (Kummer-transformed for x < 0).
double kummer_1f1(double a, double b, double x);

/// 1F1(-n; b; x) in the working type T (double or Jet), Horner form.
template <class T>
T kummer_terminating(int n, double b, const T& x) {
    std::vector<double> coeff(static_cast<std::size_t>(n) + 1, 1.0);
    for (int k = 0; k < n; ++k) coeff[k + 1] = coeff[k] * (k - n) / ((b + k) * (k + 1));
    T sum(coeff[n]);
    for (int k = n - 1; k >= 0; --k) sum = sum * x + T(coeff[k]);
    return sum;
}

/// Generalized Laguerre polynomial L_n^(alpha)(x) by the three-term
/// recurrence in n.
double laguerre(int n, double alpha, double x);

/// Parameters (alpha~, beta~, gamma~, delta~) of
///   rho U'' + (1 + a - b rho - 2 rho^2) U' + ((g - 2 - a) rho - (d + (1 + a) b) / 2) U = 0.
struct HeunParams {
    double a_t = 0.0;
    double b_t = 0.0;
    double g_t = 0.0;
    double d_t = 0.0;

    /// n when gamma~ - alpha~ - 2 equals 2n for an integer n >= 0 (to rounding).
    std::optional<int> quantization() const;
};

/// Power-series coefficients of the regular solution H_B = sum c_k rho^k.
///
/// Substituting the series into the canonical equation and collecting rho^k:
///   (k+1)(k+1+a) c_{k+1} = [b k + (d + (1+a) b)/2] c_k + [2(k-1) - (g - a - 2)] c_{k-1},
/// c_0 = 1, c_{-1} = 0. Once g - a - 2 = 2n the c_{k-1} factor vanishes at
/// k = n + 1, so c_{n+1} = 0 cuts the series to a degree-n polynomial.
struct HeunSeries {
    HeunParams params;
    std::vector<double> coeffs;
    int truncation_k = 0;
    /// max(|c_K|, |c_{K-1}|): the size of the last retained terms.
    double tail_coefficient = 0.0;
    /// Set when every coefficient past this degree is negligible.
    std::optional<int> polynomial_degree;
};

HeunSeries heun_coeffs(const HeunParams& params, int truncation_k = 200);

struct HeunValue {
    double value;
    double tail_bound;
};

/// Partial sum at rho with the relative size of the last retained terms;
/// throws TruncationError when that bound exceeds tol.
HeunValue heun_eval(const HeunSeries& series, double rho, double tol = 1e-9);

/// heun_eval carried through a Jet (value, first and second derivative).
Jet heun_eval_jet(const HeunSeries& series, const Jet& rho, double tol = 1e-9);

/// c_{n+1} as a function of delta~ with gamma~ = alpha~ + 2 + 2n.
double heun_termination_gap(double a_t, double b_t, int n, double d_t);

/// All real delta~ for which the series with gamma~ = alpha~ + 2 + 2n
/// terminates at degree n, ascending.
std::vector<double> heun_termination_deltas(double a_t, double b_t, int n);

/// One additive piece c(rho) * f^(order)(rho) of a linear second-order ODE.
struct OdeTerm {
    int order;
    std::function<double(double)> coefficient;
};

/// sum of terms == 0; keeping the pieces separate lets the residual be
/// normalised by the largest individual contribution.
struct LinearOde {
    std::vector<OdeTerm> terms;
    /// Radial equations are sampled on rho > 0 only.
    bool radial = true;
};

/// The canonical equation above, term by term.
LinearOde heun_canonical_ode(const HeunParams& params);

/// Normal (Schroedinger) form of the same equation:
///   R'' + [(1 - a^2)/(4 rho^2) - d/(2 rho) - b rho - rho^2 + g - b^2/4] R = 0.
LinearOde heun_normal_ode(const HeunParams& params);

/// max over points of |sum c_k f^(k)| / (max_k |c_k| * max(|f|, |f'|, |f''|)).
double ode_residual(const std::function<Jet(const Jet&)>& fn, const LinearOde& ode,
                    std::span<const double> points);

/// Same, with derivatives of a value-only function taken by a five-point
/// central stencil.
double ode_residual_fd(const std::function<double(double)>& fn, const LinearOde& ode,
                       std::span<const double> points);

}  // namespace pdm
