#include "pdm/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdm {

namespace {

#ifdef __SIZEOF_FLOAT128__
using Wide = __float128;
#else
using Wide = long double;
#endif

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

double kummer_terminating_wide(int n, double b, double x) {
    Wide term = 1;
    Wide sum = 1;
    const Wide wx = x;
    for (int k = 0; k < n; ++k) {
        term = term * Wide(k - n) * wx / ((Wide(b) + Wide(k)) * Wide(k + 1));
        sum += term;
    }
    return static_cast<double>(sum);
}

double kummer_series(double a, double b, double x) {
    constexpr int kMaxTerms = 100000;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < kMaxTerms; ++k) {
        const double ratio = (a + k) * x / ((b + k) * (k + 1));
        term *= ratio;
        sum += term;
        // Beyond k > |a| + |b| + 2|x| the term ratio is below 1/2 and shrinking,
        // so the remaining tail is bounded by |term| * r / (1 - r).
        const double next = std::abs((a + k + 1) * x / ((b + k + 1) * (k + 2)));
        if (k > std::abs(a) + std::abs(b) + 2.0 * std::abs(x) && next < 0.5) {
            const double tail = std::abs(term) * next / (1.0 - next);
            if (tail <= 1e-16 * std::abs(sum) || term == 0.0) return sum;
        }
    }
    throw NumericError("kummer_1f1: series did not converge");
}

// Recurrence quantization offset g - a - 2, snapped to 2n when it is one.
double quantization_offset(const HeunParams& p) {
    if (auto n = p.quantization()) return 2.0 * *n;
    return p.g_t - p.a_t - 2.0;
}

std::vector<double> heun_recurrence(const HeunParams& p, int count) {
    std::vector<double> c(static_cast<std::size_t>(count) + 1, 0.0);
    c[0] = 1.0;
    const double offset = quantization_offset(p);
    const double shift = 0.5 * (p.d_t + (1.0 + p.a_t) * p.b_t);
    for (int k = 0; k < count; ++k) {
        const double prev = k > 0 ? c[k - 1] : 0.0;
        const double rhs = (p.b_t * k + shift) * c[k] + (2.0 * (k - 1) - offset) * prev;
        c[k + 1] = rhs / ((k + 1.0) * (k + 1.0 + p.a_t));
    }
    return c;
}

// c_{n+1}(delta) and d c_{n+1} / d delta via the differentiated recurrence.
std::pair<double, double> termination_gap_with_slope(double a_t, double b_t, int n, double d_t) {
    double c_prev = 0.0, c = 1.0;
    double s_prev = 0.0, s = 0.0;
    const double shift = 0.5 * (d_t + (1.0 + a_t) * b_t);
    for (int k = 0; k <= n; ++k) {
        const double denom = (k + 1.0) * (k + 1.0 + a_t);
        const double lower = 2.0 * (k - 1 - n);
        const double c_next = ((b_t * k + shift) * c + lower * c_prev) / denom;
        const double s_next = (0.5 * c + (b_t * k + shift) * s + lower * s_prev) / denom;
        c_prev = c; c = c_next;
        s_prev = s; s = s_next;
    }
    return {c, s};
}

// Number of eigenvalues below x of the symmetric tridiagonal (diag, off).
int sturm_below(const std::vector<double>& diag, const std::vector<double>& off, double x) {
    int count = 0;
    double pivot = 1.0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const double coupling = i > 0 ? off[i - 1] * off[i - 1] / pivot : 0.0;
        pivot = diag[i] - x - coupling;
        if (pivot == 0.0) pivot = -std::numeric_limits<double>::min() * 1e4;
        if (pivot < 0.0) ++count;
    }
    return count;
}

}  // namespace

double kummer_1f1(double a, double b, double x) {
    if (is_nonpositive_integer(b)) throw DomainError("kummer_1f1: b is a non-positive integer (pole)");
    if (is_nonpositive_integer(a) && a > -1e6) return kummer_terminating_wide(static_cast<int>(-a), b, x);
    if (x == 0.0) return 1.0;
    if (x < 0.0) {
        const double c = b - a;
        if (is_nonpositive_integer(c) && c > -1e6)
            return std::exp(x) * kummer_terminating_wide(static_cast<int>(-c), b, -x);
        return std::exp(x) * kummer_series(c, b, -x);
    }
    return kummer_series(a, b, x);
}

double laguerre(int n, double alpha, double x) {
    if (n < 0) throw DomainError("laguerre: degree must be >= 0");
    if (!(alpha > -1.0)) throw DomainError("laguerre: alpha must exceed -1");
    Wide prev = 1;
    if (n == 0) return 1.0;
    const Wide wa = alpha;
    const Wide wx = x;
    Wide cur = Wide(1) + wa - wx;
    for (int k = 1; k < n; ++k) {
        const Wide next = ((Wide(2 * k + 1) + wa - wx) * cur - (Wide(k) + wa) * prev) / Wide(k + 1);
        prev = cur;
        cur = next;
    }
    return static_cast<double>(cur);
}

std::optional<int> HeunParams::quantization() const {
    const double offset = g_t - a_t - 2.0;
    const double half = std::nearbyint(0.5 * offset);
    if (half < 0.0 || half > 1e6) return std::nullopt;
    const double scale = 1.0 + std::abs(g_t) + std::abs(a_t);
    if (std::abs(offset - 2.0 * half) > 1e-12 * scale) return std::nullopt;
    return static_cast<int>(half);
}

HeunSeries heun_coeffs(const HeunParams& params, int truncation_k) {
    if (!(params.a_t > -1.0)) throw DomainError("heun_coeffs: alpha~ must exceed -1 for the regular branch");
    if (truncation_k < 1) throw DomainError("heun_coeffs: truncation order must be >= 1");
    HeunSeries series{params, heun_recurrence(params, truncation_k), truncation_k, 0.0, std::nullopt};
    const auto& c = series.coeffs;
    series.tail_coefficient = std::max(std::abs(c[truncation_k]), std::abs(c[truncation_k - 1]));
    if (auto n = params.quantization(); n && *n < truncation_k) {
        double head = 0.0, rest = 0.0;
        for (int k = 0; k <= truncation_k; ++k) {
            double& bucket = k <= *n ? head : rest;
            bucket = std::max(bucket, std::abs(c[k]));
        }
        if (rest <= 1e-14 * head) series.polynomial_degree = *n;
    }
    return series;
}

HeunValue heun_eval(const HeunSeries& series, double rho, double tol) {
    const Jet value = heun_eval_jet(series, Jet(rho), tol);
    double tail = 0.0;
    if (!series.polynomial_degree) {
        const int K = series.truncation_k;
        const auto& c = series.coeffs;
        tail = std::max(std::abs(c[K] * std::pow(rho, K)), std::abs(c[K - 1] * std::pow(rho, K - 1)));
        tail = value.v != 0.0 ? tail / std::abs(value.v) : tail;
    }
    return {value.v, tail};
}

Jet heun_eval_jet(const HeunSeries& series, const Jet& rho, double tol) {
    if (rho.v < 0.0) throw DomainError("heun_eval: rho must be >= 0");
    const auto& c = series.coeffs;
    const int degree = series.polynomial_degree.value_or(series.truncation_k);
    Jet sum(c[degree]);
    for (int k = degree - 1; k >= 0; --k) sum = sum * rho + Jet(c[k]);
    if (!series.polynomial_degree) {
        const int K = series.truncation_k;
        const double r = rho.v;
        const double last = std::max(std::abs(c[K] * std::pow(r, K)), std::abs(c[K - 1] * std::pow(r, K - 1)));
        if (!(last <= tol * std::abs(sum.v)))
            throw TruncationError("heun_eval: series tail exceeds tolerance at this radius");
    }
    return sum;
}

double heun_termination_gap(double a_t, double b_t, int n, double d_t) {
    return termination_gap_with_slope(a_t, b_t, n, d_t).first;
}

std::vector<double> heun_termination_deltas(double a_t, double b_t, int n) {
    if (n < 0) throw DomainError("heun_termination_deltas: n must be >= 0");
    if (!(a_t > -1.0)) throw DomainError("heun_termination_deltas: alpha~ must exceed -1");
    // The n+1 equations k = 0..n with c_{n+1} = 0 read M c = (delta/2) c with
    //   M_kk = -b (k + (1+a)/2),  M_k,k+1 = (k+1)(k+1+a),  M_k+1,k = 2(n-k).
    // Off-diagonal products are positive, so M is similar to a symmetric
    // tridiagonal matrix and delta/2 runs over its n+1 real, simple eigenvalues.
    const int size = n + 1;
    std::vector<double> diag(size), off(std::max(size - 1, 0));
    for (int k = 0; k < size; ++k) diag[k] = -b_t * (k + 0.5 * (1.0 + a_t));
    for (int k = 0; k + 1 < size; ++k) off[k] = std::sqrt((k + 1.0) * (k + 1.0 + a_t) * 2.0 * (n - k));

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < size; ++k) {
        const double radius = (k > 0 ? off[k - 1] : 0.0) + (k + 1 < size ? off[k] : 0.0);
        lo = std::min(lo, diag[k] - radius);
        hi = std::max(hi, diag[k] + radius);
    }
    const double pad = 1e-9 * (1.0 + std::abs(lo) + std::abs(hi));
    lo -= pad;
    hi += pad;

    std::vector<double> roots;
    roots.reserve(size);
    for (int j = 0; j < size; ++j) {
        double a = lo, b = hi;
        while (b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b))) {
            const double mid = 0.5 * (a + b);
            if (mid == a || mid == b) break;
            (sturm_below(diag, off, mid) > j ? b : a) = mid;
        }
        double delta = a + b;  // 2 * midpoint
        // Newton polish on the recurrence itself; keep only improving steps.
        auto [f, slope] = termination_gap_with_slope(a_t, b_t, n, delta);
        for (int it = 0; it < 8 && f != 0.0 && slope != 0.0; ++it) {
            const double trial = delta - f / slope;
            auto [ft, st] = termination_gap_with_slope(a_t, b_t, n, trial);
            if (!(std::abs(ft) < std::abs(f))) break;
            delta = trial;
            f = ft;
            slope = st;
        }
        roots.push_back(delta);
    }
    return roots;
}

LinearOde heun_canonical_ode(const HeunParams& p) {
    const double offset = p.g_t - 2.0 - p.a_t;
    return LinearOde{{
        {2, [](double r) { return r; }},
        {1, [a = p.a_t](double) { return 1.0 + a; }},
        {1, [b = p.b_t](double r) { return -b * r; }},
        {1, [](double r) { return -2.0 * r * r; }},
        {0, [offset](double r) { return offset * r; }},
        {0, [d = p.d_t](double) { return -0.5 * d; }},
        {0, [a = p.a_t, b = p.b_t](double) { return -0.5 * (1.0 + a) * b; }},
    }};
}

LinearOde heun_normal_ode(const HeunParams& p) {
    return LinearOde{{
        {2, [](double) { return 1.0; }},
        {0, [a = p.a_t](double r) { return (1.0 - a * a) / (4.0 * r * r); }},
        {0, [d = p.d_t](double r) { return -0.5 * d / r; }},
        {0, [b = p.b_t](double r) { return -b * r; }},
        {0, [](double r) { return -r * r; }},
        {0, [g = p.g_t](double) { return g; }},
        {0, [b = p.b_t](double) { return -0.25 * b * b; }},
    }};
}

namespace {

// Normwise relative residual: |sum c_k f^(k)| / (max_k |c_k| * max_j |f^(j)|).
// Stays meaningful at nodes of f and when every term cancels exactly.
double residual_at(const Jet& f, const LinearOde& ode, double rho) {
    double sum = 0.0, coefficient_scale = 0.0;
    for (const auto& term : ode.terms) {
        const double c = term.coefficient(rho);
        const double derivative = term.order == 0 ? f.v : term.order == 1 ? f.d : f.dd;
        sum += c * derivative;
        coefficient_scale = std::max(coefficient_scale, std::abs(c));
    }
    const double scale = coefficient_scale * std::max({std::abs(f.v), std::abs(f.d), std::abs(f.dd)});
    return scale == 0.0 ? 0.0 : std::abs(sum) / scale;
}

bool vanishes(const Jet& f) { return f.v == 0.0 && f.d == 0.0 && f.dd == 0.0; }

void require_nonzero(bool any_nonzero) {
    if (!any_nonzero) throw DomainError("ode_residual: function vanishes at every sample point (degenerate input)");
}

}  // namespace

double ode_residual(const std::function<Jet(const Jet&)>& fn, const LinearOde& ode,
                    std::span<const double> points) {
    double worst = 0.0;
    bool any_nonzero = false;
    for (double rho : points) {
        if (ode.radial && !(rho > 0.0)) throw DomainError("ode_residual: sample points must be positive");
        const Jet f = fn(Jet::variable(rho));
        any_nonzero = any_nonzero || !vanishes(f);
        worst = std::max(worst, residual_at(f, ode, rho));
    }
    require_nonzero(any_nonzero);
    return worst;
}

double ode_residual_fd(const std::function<double(double)>& fn, const LinearOde& ode,
                       std::span<const double> points) {
    double worst = 0.0;
    bool any_nonzero = false;
    for (double rho : points) {
        if (ode.radial && !(rho > 0.0)) throw DomainError("ode_residual: sample points must be positive");
        const double h = 1e-3 * std::min(1.0, rho);
        const double fm2 = fn(rho - 2 * h), fm1 = fn(rho - h), f0 = fn(rho), fp1 = fn(rho + h), fp2 = fn(rho + 2 * h);
        const Jet f{f0, (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h),
                    (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * h * h)};
        any_nonzero = any_nonzero || !vanishes(f);
        worst = std::max(worst, residual_at(f, ode, rho));
    }
    require_nonzero(any_nonzero);
    return worst;
}

}  // namespace pdm
