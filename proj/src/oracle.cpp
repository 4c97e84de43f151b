#include "pdm/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "pdm/errors.hpp"

namespace pdm {

namespace {

// Potential part of the reduced equation, everything except -U'':
// (m~^2 - 1/4)/rho^2 + V_eff(rho; E) with the folded constant removed.
double reduced_q(const RadialProblem& problem, double rho, double energy) {
    const double mt = problem.m_tilde;
    return (mt * mt - 0.25) / (rho * rho) + v_eff(problem, rho, energy) - problem.folded_constant();
}

TridiagonalOperator assemble(const RadialProblem& problem, double energy, const Grid& grid, Scheme scheme,
                             double p) {
    const int n = grid.n;
    const double h = grid.h();
    const double inv_h2 = 1.0 / (h * h);
    TridiagonalOperator op;
    op.diag.resize(n);
    op.off.resize(n - 1);
    if (scheme == Scheme::Uniform) {
        for (int i = 0; i < n; ++i) {
            const double rho = (i + 1) * h;
            op.diag[i] = 2.0 * inv_h2 + reduced_q(problem, rho, energy);
        }
        std::fill(op.off.begin(), op.off.end(), -inv_h2);
        return op;
    }
    // -U'' + p(p-1)/rho^2 U = -rho^-p (rho^2p w')' with U = rho^p w, discretized
    // in flux form on cell centres; the face at rho = 0 carries zero weight.
    const double two_p = 2.0 * p;
    const double singular = p * (p - 1.0);
    for (int i = 0; i < n; ++i) {
        const double rho = (i + 0.5) * h;
        const double up = std::pow((i + 1.0) / (i + 0.5), two_p);
        const double down = i == 0 ? 0.0 : std::pow(i / (i + 0.5), two_p);
        op.diag[i] = (up + down) * inv_h2 + reduced_q(problem, rho, energy) - singular / (rho * rho);
        if (i + 1 < n) op.off[i] = -std::pow((i + 1.0) * (i + 1.0) / ((i + 0.5) * (i + 1.5)), p) * inv_h2;
    }
    return op;
}

double guarded_pivot(double pivot, double scale) {
    const double floor = std::numeric_limits<double>::epsilon() * scale;
    if (std::abs(pivot) < floor) return -floor;
    return pivot;
}

double operator_scale(const TridiagonalOperator& op) {
    const auto [lo, hi] = gershgorin_bounds(op);
    return std::max({std::abs(lo), std::abs(hi), std::numeric_limits<double>::min()});
}

int sturm_count_scaled(const TridiagonalOperator& op, double lambda, double scale) {
    int count = 0;
    double pivot = 1.0;
    for (int i = 0; i < op.size(); ++i) {
        const double coupling = i > 0 ? op.off[i - 1] * op.off[i - 1] / pivot : 0.0;
        pivot = guarded_pivot(op.diag[i] - lambda - coupling, scale);
        if (pivot < 0.0) ++count;
    }
    return count;
}

// Outer classical turning point of q - target, scanning outward; nullopt when
// the level sits nowhere in a well.
std::optional<double> outer_turning_point(const RadialProblem& problem, double energy) {
    const double target = problem.target();
    std::optional<double> last;
    constexpr double kStep = 0.02;
    constexpr int kSteps = 10000;
    for (int k = 1; k <= kSteps; ++k) {
        const double rho = k * kStep;
        if (reduced_q(problem, rho, energy) < target) last = rho + kStep;
    }
    if (last && *last >= kSteps * kStep) return std::nullopt;
    return last;
}

using State = std::array<double, 2>;

struct ReducedSystem {
    const RadialProblem* problem;
    double energy;
    double target;
    void operator()(const State& y, State& dy, double rho) const {
        dy[0] = y[1];
        dy[1] = (reduced_q(*problem, rho, energy) - target) * y[0];
    }
};

// Integrates from a to b in geometric (a < b) or linear chunks, renormalizing
// between chunks; returns the number of sign changes of U seen on the way.
int integrate_leg(const ReducedSystem& sys, State& y, double a, double b, const ShootingControls& c) {
    namespace odeint = boost::numeric::odeint;
    auto stepper = odeint::make_controlled(c.abs_tol, c.rel_tol, odeint::runge_kutta_dopri5<State>());
    constexpr int kChunks = 64;
    int nodes = 0;
    double sign = y[0] >= 0.0 ? 1.0 : -1.0;
    auto observer = [&](const State& s, double) {
        if (s[0] != 0.0 && (s[0] > 0.0) != (sign > 0.0)) {
            ++nodes;
            sign = -sign;
        }
    };
    const bool outward = b > a;
    for (int j = 0; j < kChunks; ++j) {
        const double t0 = outward ? a * std::pow(b / a, double(j) / kChunks) : a + (b - a) * j / kChunks;
        const double t1 = outward ? a * std::pow(b / a, double(j + 1) / kChunks) : a + (b - a) * (j + 1) / kChunks;
        const double dt = (t1 - t0) * 1e-3;
        odeint::integrate_adaptive(stepper, sys, y, t0, t1, dt, observer);
        const double size = std::max(std::abs(y[0]), std::abs(y[1]));
        if (!std::isfinite(size)) throw NumericError("shooting: integration overflow");
        if (size > 1e100 || size < 1e-100) {
            y[0] /= size;
            y[1] /= size;
        }
    }
    return nodes;
}

double simpson(const std::function<double(double)>& w, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = w(lm), frm = w(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson(w, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(w, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Bisection in E at a frozen discretization exponent.
double solve_at_exponent(const RadialProblem& problem, int n_rho, double guess, const Grid& grid,
                         const OracleConfig& cfg, double p) {
    const double target = problem.target();
    const double ceiling = energy_ceiling(problem);
    if (ceiling == -std::numeric_limits<double>::infinity())
        throw NoRootError("no bound state: the operator is not confining");
    // True when mu_{n_rho}(E) < target, i.e. E lies above the root.
    auto above = [&](double e) {
        const auto op = assemble(problem, e, grid, cfg.scheme, p);
        return sturm_count(op, target) > n_rho;
    };
    const double width = std::max(1.0, 0.5 * std::abs(guess));
    double lo = guess - width;
    double hi = std::min(guess + width, ceiling);
    if (lo >= hi) lo = hi - width;
    double step = width;
    int expansions = 0;
    while (!above(hi)) {
        if (hi >= ceiling) throw NoRootError("no bound state below the energy ceiling");
        if (++expansions > cfg.max_refinements) throw NoRootError("bracket expansion exhausted (upper side)");
        lo = hi;
        step *= cfg.bracket_expansion_factor;
        hi = std::min(hi + step, ceiling);
    }
    step = width;
    expansions = 0;
    while (above(lo)) {
        if (++expansions > cfg.max_refinements) throw NoRootError("bracket expansion exhausted (lower side)");
        hi = lo;
        step *= cfg.bracket_expansion_factor;
        lo -= step;
    }
    while (hi - lo > cfg.energy_tol * std::max(1.0, std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (above(mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Grid::Grid(double rho_max_, int n_) : rho_max(rho_max_), n(n_) {
    if (!(rho_max_ > 0.0)) throw DomainError("grid rho_max must be > 0");
    if (n_ < 16) throw DomainError("grid needs at least 16 interior points");
}

double indicial_exponent(const RadialProblem& problem, double energy) {
    const double c = centrifugal_strength(problem, energy);
    return c < -0.25 ? 0.5 : 0.5 + std::sqrt(c + 0.25);
}

TridiagonalOperator discretize(const RadialProblem& problem, double energy, const Grid& grid, Form form,
                               Scheme scheme) {
    if (form == Form::R && problem.mass.kind() != MassKind::LambdaRho)
        throw ConfigError("the R-form operator exists only for the lambda*rho mass profile");
    const double p = scheme == Scheme::IndicialWeighted ? indicial_exponent(problem, energy) : 0.0;
    return assemble(problem, energy, grid, scheme, p);
}

TridiagonalOperator discretize_interval(const std::function<double(double)>& q, double a, double b, int n) {
    if (!(b > a)) throw DomainError("interval must satisfy a < b");
    if (n < 2) throw DomainError("interval discretization needs at least 2 nodes");
    const double h = (b - a) / (n + 1);
    const double inv_h2 = 1.0 / (h * h);
    TridiagonalOperator op;
    op.diag.resize(n);
    op.off.assign(n - 1, -inv_h2);
    for (int i = 0; i < n; ++i) op.diag[i] = 2.0 * inv_h2 + q(a + (i + 1) * h);
    return op;
}

std::pair<double, double> gershgorin_bounds(const TridiagonalOperator& op) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const int n = op.size();
    for (int i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(op.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(op.off[i]) : 0.0);
        lo = std::min(lo, op.diag[i] - r);
        hi = std::max(hi, op.diag[i] + r);
    }
    return {lo, hi};
}

int sturm_count(const TridiagonalOperator& op, double lambda) {
    return sturm_count_scaled(op, lambda, operator_scale(op));
}

double kth_eigenvalue(const TridiagonalOperator& op, int k, double tol) {
    if (k < 0 || k >= op.size()) throw DomainError("eigenvalue index out of range");
    auto [lo, hi] = gershgorin_bounds(op);
    const double scale = operator_scale(op);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (sturm_count_scaled(op, mid, scale) > k ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

Grid default_grid(const RadialProblem& problem, double energy, int n_points) {
    constexpr double kFallback = 20.0;
    constexpr double kDecay = 25.0;
    const auto turning = outer_turning_point(problem, energy);
    if (!turning) return Grid(kFallback, n_points);
    const double target = problem.target();
    double rho = *turning, integral = 0.0;
    constexpr double kStep = 0.01;
    while (integral < kDecay && rho < 1e4) {
        const double mid = rho + 0.5 * kStep;
        integral += kStep * std::sqrt(std::max(0.0, reduced_q(problem, mid, energy) - target));
        rho += kStep;
    }
    if (integral < kDecay) return Grid(kFallback, n_points);
    return Grid(std::max(rho, 1.5 * *turning), n_points);
}

double solve_self_consistent_E(const RadialProblem& problem, int n_rho, double guess, const Grid& grid,
                               const OracleConfig& cfg) {
    if (n_rho < 0 || n_rho >= grid.n) throw DomainError("n_rho out of range for the grid");
    if (cfg.scheme == Scheme::Uniform) return solve_at_exponent(problem, n_rho, guess, grid, cfg, 0.0);
    // The exponent is frozen during each bisection so the operator moves
    // monotonically with E, then re-derived from the converged energy.
    double p = indicial_exponent(problem, guess);
    double energy = guess;
    for (int pass = 0; pass < 6; ++pass) {
        energy = solve_at_exponent(problem, n_rho, energy, grid, cfg, p);
        const double next = indicial_exponent(problem, energy);
        if (std::abs(next - p) <= 1e-15 * std::max(1.0, p)) break;
        p = next;
    }
    return energy;
}

RefinedEnergy richardson_refine(const RadialProblem& problem, int n_rho, double guess, const OracleConfig& cfg) {
    const Grid base = cfg.rho_max > 0.0 ? Grid(cfg.rho_max, cfg.n_points) : default_grid(problem, guess, cfg.n_points);
    const Grid fine(base.rho_max, 2 * base.n + 1);
    const Grid wide(1.5 * base.rho_max, 3 * base.n + 2);
    RefinedEnergy r{};
    r.grid = base;
    r.coarse = solve_self_consistent_E(problem, n_rho, guess, base, cfg);
    r.fine = solve_self_consistent_E(problem, n_rho, r.coarse, fine, cfg);
    r.wide = solve_self_consistent_E(problem, n_rho, r.fine, wide, cfg);
    r.energy = r.fine + (r.fine - r.coarse) / 3.0;
    r.error_estimate = std::max(std::abs(r.fine - r.coarse) / 3.0, std::abs(r.wide - r.fine));
    return r;
}

std::vector<double> eigenvector(const TridiagonalOperator& op, double eigenvalue, std::uint64_t seed) {
    const int n = op.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = uniform(rng);
    const double scale = operator_scale(op);

    for (int iter = 0; iter < 3; ++iter) {
        // Gaussian elimination with partial pivoting on (T - lambda I) x_new = x.
        std::vector<double> dl(op.off), d(n), du(op.off), du2(std::max(n - 2, 0), 0.0), b(x);
        for (int i = 0; i < n; ++i) d[i] = op.diag[i] - eigenvalue;
        for (int i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                d[i] = guarded_pivot(d[i], scale);
                const double f = dl[i] / d[i];
                d[i + 1] -= f * du[i];
                b[i + 1] -= f * b[i];
            } else {
                const double f = d[i] / dl[i];
                d[i] = dl[i];
                const double t = d[i + 1];
                d[i + 1] = du[i] - f * t;
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du2[i];
                }
                du[i] = t;
                const double bt = b[i];
                b[i] = b[i + 1];
                b[i + 1] = bt - f * b[i + 1];
            }
        }
        d[n - 1] = guarded_pivot(d[n - 1], scale);
        b[n - 1] /= d[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (int i = n - 3; i >= 0; --i) b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];

        double norm = 0.0;
        for (double v : b) norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericError("inverse iteration failed to converge");
        for (int i = 0; i < n; ++i) x[i] = b[i] / norm;
    }
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    for (double v : x) {
        if (std::abs(v) > 1e-3 * peak) {
            if (v < 0.0)
                for (auto& w : x) w = -w;
            break;
        }
    }
    return x;
}

int count_nodes(const std::vector<double>& v, double rel_floor) {
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    int nodes = 0;
    int sign = 0;
    for (double x : v) {
        if (std::abs(x) <= rel_floor * peak) continue;
        const int s = x > 0.0 ? 1 : -1;
        if (sign != 0 && s != sign) ++nodes;
        sign = s;
    }
    return nodes;
}

ShootingResult shooting_check(const RadialProblem& problem, double energy, const ShootingControls& controls) {
    const double rho_max = controls.rho_max > 0.0 ? controls.rho_max : default_grid(problem, energy).rho_max;
    const double rho0 = controls.rho_start;
    const auto turning = outer_turning_point(problem, energy);
    const double match = turning ? std::min(*turning, 0.9 * rho_max) : 0.5 * rho_max;
    const ReducedSystem sys{&problem, energy, problem.target()};

    const double s = indicial_exponent(problem, energy);
    State out{1.0, s / rho0};
    const int nodes_out = integrate_leg(sys, out, rho0, match, controls);

    const double kappa = std::sqrt(std::max(0.0, reduced_q(problem, rho_max, energy) - problem.target()));
    State in{1.0, -kappa};
    const int nodes_in = integrate_leg(sys, in, rho_max, match, controls);

    const double l_out = out[1] / out[0];
    const double l_in = in[1] / in[0];
    const double mismatch = std::abs(l_out - l_in) / std::max({std::abs(l_out), std::abs(l_in), 1.0});
    return {nodes_out + nodes_in, mismatch, match};
}

Normalization normalize_radial(const std::function<double(double)>& f, Measure measure, double a, double b,
                               double rel_tol) {
    if (!(b > a)) throw DomainError("normalization interval must satisfy a < b");
    auto weight = [&](double rho) {
        const double v = f(rho);
        return v * v * (measure == Measure::RhoDRho ? rho : 1.0);
    };
    constexpr int kPanels = 64;
    const double width = (b - a) / kPanels;
    double rough = 0.0;
    std::vector<std::array<double, 4>> panels;
    for (int j = 0; j < kPanels; ++j) {
        const double l = a + j * width, r = j + 1 == kPanels ? b : l + width;
        const double fl = weight(l), fm = weight(0.5 * (l + r)), fr = weight(r);
        panels.push_back({l, r, fl, fm});
        rough += (r - l) / 6.0 * (fl + 4.0 * fm + fr);
    }
    double total = 0.0;
    const double tol = rel_tol * std::abs(rough) / kPanels;
    for (const auto& [l, r, fl, fm] : panels) {
        const double fr = weight(r);
        const double whole = (r - l) / 6.0 * (fl + 4.0 * fm + fr);
        total += tol > 0.0 ? simpson(weight, l, r, fl, fm, fr, whole, tol, 40) : whole;
    }
    if (!(total > 0.0) || !std::isfinite(total)) return {0.0, total, true};
    return {1.0 / std::sqrt(total), total, false};
}

ZOracleResult z_channel_oracle(const ZModel& z, int n_z, int n_points) {
    if (n_z < 0) throw DomainError("n_z must be >= 0");
    std::function<double(double)> q = [](double) { return 0.0; };
    double a = 0.0, b = 0.0, b_wide = 0.0;
    if (const auto* w = std::get_if<InfiniteWell>(&z)) {
        if (!(w->width > 0.0)) throw DomainError("well width L must be > 0");
        b = b_wide = w->width;
    } else if (const auto* m = std::get_if<Morse>(&z)) {
        if (!(m->depth > 0.0) || !(m->range > 0.0)) throw DomainError("Morse D and sigma must be > 0");
        const Morse pot = *m;
        q = [pot](double x) { return pot(x); };
        a = -5.0 / m->range;
        b = std::log(2.0 * m->depth / 1e-8) / m->range;
        b_wide = b + 5.0 / m->range;
    } else {
        throw DomainError("a fixed kz2 channel has no z equation to solve");
    }
    auto solve = [&](double right, int n) { return kth_eigenvalue(discretize_interval(q, a, right, n), n_z); };
    const double coarse = solve(b, n_points);
    const double fine = solve(b, 2 * n_points + 1);
    double error = std::abs(fine - coarse) / 3.0;
    if (b_wide > b) {
        const int n_wide = static_cast<int>(std::lround((b_wide - a) / (b - a) * (2 * n_points + 2))) - 1;
        error = std::max(error, std::abs(solve(b_wide, n_wide) - fine));
    }
    return {fine + (fine - coarse) / 3.0, error};
}

}  // namespace pdm
