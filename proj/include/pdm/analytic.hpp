#pragma once

// Closed-form spectra: the z channel, the four position-dependent-mass
// models plus the constant-mass reference, radial eigenfunctions and the
// composition into total levels and tables.

#include <complex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pdm/model_core.hpp"
#include "pdm/specfun.hpp"

namespace pdm {

/// z channel given directly by its separation constant.
struct FixedKz2 {
    double value = 0.0;
};

using ZModel = std::variant<InfiniteWell, Morse, FixedKz2>;

/// (n_z + 1)^2 pi^2 / L^2.
double kz2_infinite_well(double width, int n_z);

/// s = sqrt(D)/sigma - n_z - 1/2; throws NoStateError unless s > 0.
double morse_exponent(double depth, double range, int n_z);

/// Bound-state eigenvalue of -Z'' + V(z) Z = kz2 Z for the Morse well:
/// kz2 = -sigma^2 s^2 (negative, measured from the dissociation limit).
double kz2_morse(double depth, double range, int n_z);

/// s^2, the value obtained by dropping the sigma^2 scale and the sign.
double kz2_morse_paper_literal(double depth, double range, int n_z);

double kz2_for(const ZModel& z, int n_z);

/// Well: sin((n_z+1) pi z / L). Morse: y^s e^{-y/2} L_n^{2s}(y), y = (2 sqrt(D)/sigma) e^{-sigma z}.
/// A fixed kz2 has no z profile and evaluates to 1.
double z_eigenfunction(const ZModel& z, int n_z, double z_coord);

/// One analytic level with its validity flags.
struct LevelResult {
    Model model = Model::I;
    QuantumNumbers qn;
    double alpha = 0.0;
    double m_tilde = 0.0;
    double kz2 = 0.0;
    std::optional<double> energy;
    /// Value of the formula exactly as originally printed, where it differs.
    std::optional<double> energy_paper_literal;

    bool precondition_ok = false;
    bool termination_ok = true;
    bool normalizable = false;
    bool borderline = false;

    // Shape parameters of the radial solution.
    double ell = 0.0;    // oscillator index |l~| (models I, II, constant mass)
    double omega = 0.0;  // oscillator frequency
    std::optional<HeunParams> heun;  // models III, IV

    std::string note;

    bool valid() const { return precondition_ok && energy.has_value(); }
};

LevelResult model1_energy(double eta, const FieldConfig& field, const Pseudoharmonic& pot, int m, double kz2,
                          int n_rho);
LevelResult model2_energy(double eta, const FieldConfig& field, const Pseudoharmonic& pot, int m, double kz2,
                          int n_rho);
/// Throws ConfigError unless e^2 B0^2 / 4 + V2 = 1.
LevelResult model3_energy(double lambda, const FieldConfig& field, const Killingbeck& pot, int m, double kz2,
                          int n_rho);
LevelResult model4_energy(double lambda, const FieldConfig& field, const Killingbeck& pot, int m, double kz2,
                          int n_rho);
LevelResult constant_mass_energy(const FieldConfig& field, const Pseudoharmonic& pot, int m, double kz2, int n_rho);

/// Unnormalized radial eigenfunction of a valid level, in both the R(rho)
/// and the reduced U(rho) = sqrt(rho / g) R(rho) normalisation.
class RadialFunction {
public:
    explicit RadialFunction(const LevelResult& level);

    double R(double rho) const { return eval(Jet(rho), false).v; }
    double U(double rho) const { return eval(Jet(rho), true).v; }
    Jet R(const Jet& rho) const { return eval(rho, false); }
    Jet U(const Jet& rho) const { return eval(rho, true); }

private:
    Jet eval(const Jet& rho, bool reduced) const;

    LevelResult level_;
    double r_power_ = 0.0;
    double u_power_ = 0.0;
    std::optional<HeunSeries> series_;
};

double radial_R(const LevelResult& level, double rho);

/// Full physical description of one system: everything but the quantum numbers.
struct SystemSpec {
    Model model;
    double mass_coefficient;  // eta or lambda; ignored for the constant mass
    FieldConfig field;
    RadialPotential potential;
    ZModel z;
};

/// Combines the z-channel constant with the radial model. A missing z bound
/// state yields an invalid level rather than an exception.
LevelResult total_energy(const SystemSpec& spec, const QuantumNumbers& qn);

/// Radial problem underlying a level (same m~ and kz2).
RadialProblem radial_problem(const SystemSpec& spec, const LevelResult& level);

/// -U'' + [(m~^2 - 1/4)/rho^2 + V_eff(rho; E) - folded] U - target U = 0, term by term.
LinearOde reduced_ode(const RadialProblem& problem, double energy);

/// R(rho) Z(z) e^{i m phi}, unnormalized.
std::complex<double> total_wavefunction(const SystemSpec& spec, const LevelResult& level, double rho, double phi,
                                        double z);

/// Inclusive index range; lo > hi is empty.
struct IndexRange {
    int lo = 0;
    int hi = -1;
};

struct LevelRanges {
    IndexRange n_rho;
    IndexRange m;
    IndexRange n_z;
};

/// Every (n_z, m, n_rho) in the ranges, lexicographically ordered, invalid
/// levels included.
std::vector<LevelResult> spectrum_table(const SystemSpec& spec, const LevelRanges& ranges);

/// Valid levels of a table in ascending energy (ties keep table order).
std::vector<LevelResult> sorted_by_energy(const std::vector<LevelResult>& table);

/// Relative tolerance for matching 2 V3 against a termination root.
inline constexpr double kTerminationTol = 1e-6;

}  // namespace pdm
