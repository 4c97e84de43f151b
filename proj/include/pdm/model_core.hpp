#pragma once

// Physical parameters and the assembly of the separated radial problem.
//
// Units: hbar = 2 m0 = 1 throughout, every quantity is dimensionless.
// The radial equation in one-dimensional form reads
//
//     -U'' + (m~^2 - 1/4)/rho^2 U + V_eff(rho; E) U = target U,
//     V_eff = V(rho) + e^2 B0^2 rho^2 / 4 - g(rho) E + mass_term(rho),
//
// with R(rho) = sqrt(g/rho) U(rho) and m~ = m - alpha.

#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace pdm {

inline constexpr double kPi = 3.14159265358979323846;

/// Charge, uniform field along z and Aharonov-Bohm flux.
///
/// The flux is stored; alpha = e * phi_AB / (2 pi) is derived on demand
/// so that the flux quantum 2 pi / e always tracks the charge sign.
class FieldConfig {
public:
    FieldConfig(double charge, double b_field, double flux);
    static FieldConfig from_alpha(double charge, double b_field, double alpha);

    double charge() const { return charge_; }
    double b_field() const { return b_field_; }
    double flux() const { return flux_; }
    double alpha() const;
    /// e * B0, the Landau coupling that multiplies m~ in the target.
    double cyclotron() const { return charge_ * b_field_; }

private:
    double charge_;
    double b_field_;
    double flux_;
};

struct QuantumNumbers {
    int n_rho = 0;
    int m = 0;
    int n_z = 0;

    friend bool operator==(const QuantumNumbers&, const QuantumNumbers&) = default;
    friend auto operator<=>(const QuantumNumbers&, const QuantumNumbers&) = default;
};

enum class MassKind { Constant, EtaRhoSq, EtaOverRhoSq, LambdaRho, LambdaOverRhoSq };

/// Radial mass multiplier g(rho) = c * rho^p.
class MassProfile {
public:
    static MassProfile constant();
    static MassProfile eta_rho_sq(double eta);
    static MassProfile eta_over_rho_sq(double eta);
    static MassProfile lambda_rho(double lambda);
    static MassProfile lambda_over_rho_sq(double lambda);

    MassKind kind() const { return kind_; }
    double coefficient() const { return coefficient_; }
    int power() const;

    double g(double rho) const;
    double dg(double rho) const;
    double d2g(double rho) const;

private:
    MassProfile(MassKind kind, double coefficient);

    MassKind kind_;
    double coefficient_;
};

/// V(rho) = V1 rho^2 + V2 / rho^2 - 2 V0 with V1 = V0 / rho0^2, V2 = V0 rho0^2.
struct Pseudoharmonic {
    double chemical = 0.0;  // V0 >= 0
    double rho0 = 1.0;      // > 0

    double v1() const { return chemical / (rho0 * rho0); }
    double v2() const { return chemical * rho0 * rho0; }
    double operator()(double rho) const;
};

/// V(rho) = V0 + V1 rho + V2 rho^2 + V3 / rho + V4 / rho^2.
struct Killingbeck {
    double v0 = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
    double v3 = 0.0;
    double v4 = 0.0;

    double operator()(double rho) const;
};

using RadialPotential = std::variant<Pseudoharmonic, Killingbeck>;

/// Impenetrable well on 0 < z < L.
struct InfiniteWell {
    double width = 1.0;
};

/// V(z) = D [exp(-2 sigma z) - 2 exp(-sigma z)].
struct Morse {
    double depth = 1.0;
    double range = 1.0;

    double operator()(double z) const;
};

using ZPotential = std::variant<InfiniteWell, Morse>;

enum class Model { I, II, III, IV, ConstantMass };

std::string_view model_name(Model model);
std::optional<Model> parse_model(std::string_view name);

/// Mass profile family each model is defined with.
MassProfile mass_profile_for(Model model, double coefficient);

/// One separated radial problem at fixed m~ and z-channel constant.
struct RadialProblem {
    Model model;
    MassProfile mass;
    FieldConfig field;
    RadialPotential potential;
    double m_tilde;
    double kz2;

    /// Right-hand side of the reduced equation: e B0 m~ - kz2 for the
    /// pseudoharmonic models, k~^2 = e B0 m~ - kz2 - V0 for Killingbeck.
    double target() const;

    /// Constant part of V(rho) moved into target(); subtracted from the
    /// potential wherever the operator is assembled so it is counted once.
    double folded_constant() const;
};

/// Checks the model/mass/potential pairing and the parameter invariants.
RadialProblem make_radial_problem(Model model, double mass_coefficient, const FieldConfig& field,
                                  const RadialPotential& potential, double m_tilde, double kz2);

double m_tilde(int m, const FieldConfig& field);

/// (5/16)(g'/g)^2 - (1/4)(g''/g) - (1/4) g'/(rho g).
double mass_term(const MassProfile& profile, double rho);

double radial_potential(const RadialPotential& potential, double rho);

/// V(rho) + e^2 B0^2 rho^2 / 4 - g(rho) E + mass_term(rho).
double v_eff(const RadialProblem& problem, double rho, double energy);

struct ConstraintCheck {
    bool pass;
    double gamma_sq;
    double deviation;
};

/// gamma^2 = e^2 B0^2 / 4 + V2 must equal 1 for the Heun reduction.
ConstraintCheck heun_constraint_check(const FieldConfig& field, double v2, double tol = 1e-9);

/// Coefficient of 1/rho^2 in the reduced equation. The energy is required
/// for the 1/rho^2 mass profiles, where -g(rho) E lands on the centrifugal term.
double centrifugal_strength(const RadialProblem& problem, std::optional<double> energy = std::nullopt);

/// Supremum of energies for which the radial operator stays confining with a
/// regular (limit-point) origin; +inf when no ceiling exists.
double energy_ceiling(const RadialProblem& problem);

}  // namespace pdm
