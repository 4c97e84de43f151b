#pragma once

// Finite-difference verification engine for the radial and z equations:
// tridiagonal discretization, Sturm-sequence eigenvalues, the
// self-consistent energy solve, a shooting cross-check and quadrature.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pdm/analytic.hpp"
#include "pdm/model_core.hpp"

namespace pdm {

/// N interior nodes with spacing h = rho_max / (N + 1).
struct Grid {
    double rho_max = 20.0;
    int n = 4000;

    Grid() = default;
    Grid(double rho_max, int n);
    double h() const { return rho_max / (n + 1); }
};

/// Symmetric tridiagonal matrix.
struct TridiagonalOperator {
    std::vector<double> diag;
    std::vector<double> off;

    int size() const { return static_cast<int>(diag.size()); }
};

/// Reduced U equation, or the R equation of the lambda*rho mass profile
/// (there R is proportional to U, so both share one operator).
enum class Form { U, R };

/// Uniform: nodes rho_i = (i+1) h, plain three-point Laplacian.
/// IndicialWeighted: nodes rho_i = (i + 1/2) h and the Laplacian written for
/// w = U / rho^p with p the regular indicial exponent, which removes the
/// low-order error the rho^p cusp would otherwise cause; U samples are
/// returned directly.
enum class Scheme { Uniform, IndicialWeighted };

struct OracleConfig {
    double eig_tol = 1e-13;
    double energy_tol = 1e-12;
    double bracket_expansion_factor = 2.0;
    int max_refinements = 40;
    int n_points = 4000;
    /// <= 0 selects the automatic outer radius.
    double rho_max = 0.0;
    Scheme scheme = Scheme::IndicialWeighted;
    std::uint64_t seed = 0x5eed2024;
};

/// p = 1/2 + sqrt(c + 1/4) for the centrifugal strength c at energy E
/// (1/2 when c < -1/4).
double indicial_exponent(const RadialProblem& problem, double energy);

TridiagonalOperator discretize(const RadialProblem& problem, double energy, const Grid& grid, Form form = Form::U,
                               Scheme scheme = Scheme::IndicialWeighted);

/// -f'' + q f on (a, b) with Dirichlet ends, uniform nodes a + (i+1) h.
TridiagonalOperator discretize_interval(const std::function<double(double)>& q, double a, double b, int n);

/// Number of eigenvalues strictly below lambda.
int sturm_count(const TridiagonalOperator& op, double lambda);

/// Gershgorin interval containing the spectrum.
std::pair<double, double> gershgorin_bounds(const TridiagonalOperator& op);

/// k-th smallest eigenvalue (k = 0 is the ground state), bisected to width tol.
double kth_eigenvalue(const TridiagonalOperator& op, int k, double tol = 1e-13);

/// Outer radius for a level near energy E: beyond the outer turning point
/// by the distance over which the WKB decay exponent reaches 25, and at
/// least 1.5 times the turning point. Falls back to 20.
Grid default_grid(const RadialProblem& problem, double energy, int n_points = 4000);

/// E with mu_{n_rho}(E) = problem.target(), mu_k the k-th eigenvalue of the
/// discretized operator at E. Bisection in E on an expanding bracket about
/// guess, capped at energy_ceiling(problem). Throws NoRootError when no
/// bound state of that index exists below the ceiling or within
/// max_refinements expansions.
double solve_self_consistent_E(const RadialProblem& problem, int n_rho, double guess, const Grid& grid,
                               const OracleConfig& cfg = {});

struct RefinedEnergy {
    double energy;
    double error_estimate;
    double coarse;
    double fine;
    double wide;
    Grid grid;
};

/// Solves at h and h/2 and extrapolates for the O(h^2) error, then repeats
/// the fine solve on a 1.5x wider box; the estimate is the larger of the
/// two indicators.
RefinedEnergy richardson_refine(const RadialProblem& problem, int n_rho, double guess,
                                const OracleConfig& cfg = {});

/// Inverse iteration from a seeded random start; unit 2-norm with the first
/// significant component positive.
std::vector<double> eigenvector(const TridiagonalOperator& op, double eigenvalue, std::uint64_t seed = 0x5eed2024);

/// Sign changes, ignoring components below rel_floor * max|v|.
int count_nodes(const std::vector<double>& v, double rel_floor = 1e-8);

struct ShootingResult {
    int nodes;
    double mismatch;
    double match_radius;
};

struct ShootingControls {
    double rho_start = 1e-8;
    double rho_max = 0.0;  // <= 0: automatic
    double rel_tol = 1e-12;
    double abs_tol = 1e-14;
};

/// Integrates the reduced equation at energy E outward from the origin
/// (U ~ rho^s) and inward from rho_max (decaying WKB seed) and compares the
/// logarithmic derivatives at the outer turning point.
ShootingResult shooting_check(const RadialProblem& problem, double energy, const ShootingControls& controls = {});

enum class Measure { RhoDRho, DRho };

struct Normalization {
    double constant;
    double integral;
    bool degenerate;
};

/// c with c^2 * integral |f|^2 dmu = 1 over [a, b] by adaptive Simpson.
Normalization normalize_radial(const std::function<double(double)>& f, Measure measure, double a, double b,
                               double rel_tol = 1e-9);

struct ZOracleResult {
    double kz2;
    double error_estimate;
};

/// Eigenvalue n_z of -Z'' + V(z) Z = kz2 Z with Richardson refinement:
/// the well on [0, L]; the Morse well on [-5/sigma, ln(2 D / 1e-8)/sigma].
ZOracleResult z_channel_oracle(const ZModel& z, int n_z, int n_points = 4000);

}  // namespace pdm
