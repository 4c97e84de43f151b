#include "pdm/model_core.hpp"

#include <cmath>
#include <limits>

#include "pdm/errors.hpp"

namespace pdm {

namespace {

// alpha is resolved on a 2^-36 grid; see m_tilde().
constexpr int kAlphaResolutionBits = 36;

void require_positive_rho(double rho) {
    if (!(rho > 0.0)) throw DomainError("radial coordinate must be positive");
}

// Coefficient of rho^2 in V(rho).
double quadratic_coefficient(const RadialPotential& potential) {
    if (const auto* p = std::get_if<Pseudoharmonic>(&potential)) return p->v1();
    return std::get<Killingbeck>(potential).v2;
}

// Coefficient of 1/rho^2 in V(rho).
double inverse_square_coefficient(const RadialPotential& potential) {
    if (const auto* p = std::get_if<Pseudoharmonic>(&potential)) return p->v2();
    return std::get<Killingbeck>(potential).v4;
}

}  // namespace

FieldConfig::FieldConfig(double charge, double b_field, double flux)
    : charge_(charge), b_field_(b_field), flux_(flux) {
    if (!(charge != 0.0) || !std::isfinite(charge)) throw ConfigError("charge e must be finite and nonzero");
    if (!(b_field >= 0.0) || !std::isfinite(b_field)) throw ConfigError("magnetic field B0 must be finite and >= 0");
    if (!std::isfinite(flux)) throw ConfigError("Aharonov-Bohm flux must be finite");
}

FieldConfig FieldConfig::from_alpha(double charge, double b_field, double alpha) {
    if (!(charge != 0.0)) throw ConfigError("charge e must be nonzero");
    return FieldConfig(charge, b_field, 2.0 * kPi * alpha / charge);
}

double FieldConfig::alpha() const { return charge_ * flux_ / (2.0 * kPi); }

MassProfile::MassProfile(MassKind kind, double coefficient) : kind_(kind), coefficient_(coefficient) {
    if (!(coefficient > 0.0) || !std::isfinite(coefficient))
        throw ConfigError("mass coefficient must be finite and strictly positive");
}

MassProfile MassProfile::constant() { return MassProfile(MassKind::Constant, 1.0); }
MassProfile MassProfile::eta_rho_sq(double eta) { return MassProfile(MassKind::EtaRhoSq, eta); }
MassProfile MassProfile::eta_over_rho_sq(double eta) { return MassProfile(MassKind::EtaOverRhoSq, eta); }
MassProfile MassProfile::lambda_rho(double lambda) { return MassProfile(MassKind::LambdaRho, lambda); }
MassProfile MassProfile::lambda_over_rho_sq(double lambda) {
    return MassProfile(MassKind::LambdaOverRhoSq, lambda);
}

int MassProfile::power() const {
    switch (kind_) {
        case MassKind::Constant: return 0;
        case MassKind::EtaRhoSq: return 2;
        case MassKind::EtaOverRhoSq: return -2;
        case MassKind::LambdaRho: return 1;
        case MassKind::LambdaOverRhoSq: return -2;
    }
    return 0;
}

double MassProfile::g(double rho) const {
    require_positive_rho(rho);
    return coefficient_ * std::pow(rho, power());
}

double MassProfile::dg(double rho) const {
    require_positive_rho(rho);
    const int p = power();
    if (p == 0) return 0.0;
    return coefficient_ * p * std::pow(rho, p - 1);
}

double MassProfile::d2g(double rho) const {
    require_positive_rho(rho);
    const int p = power();
    if (p == 0 || p == 1) return 0.0;
    return coefficient_ * p * (p - 1) * std::pow(rho, p - 2);
}

double Pseudoharmonic::operator()(double rho) const {
    return v1() * rho * rho + v2() / (rho * rho) - 2.0 * chemical;
}

double Killingbeck::operator()(double rho) const {
    return v0 + v1 * rho + v2 * rho * rho + v3 / rho + v4 / (rho * rho);
}

double Morse::operator()(double z) const {
    const double x = std::exp(-range * z);
    return depth * (x * x - 2.0 * x);
}

std::string_view model_name(Model model) {
    switch (model) {
        case Model::I: return "model1";
        case Model::II: return "model2";
        case Model::III: return "model3";
        case Model::IV: return "model4";
        case Model::ConstantMass: return "constant-mass";
    }
    return "unknown";
}

std::optional<Model> parse_model(std::string_view name) {
    for (Model m : {Model::I, Model::II, Model::III, Model::IV, Model::ConstantMass})
        if (model_name(m) == name) return m;
    return std::nullopt;
}

MassProfile mass_profile_for(Model model, double coefficient) {
    switch (model) {
        case Model::I: return MassProfile::eta_rho_sq(coefficient);
        case Model::II: return MassProfile::eta_over_rho_sq(coefficient);
        case Model::III: return MassProfile::lambda_rho(coefficient);
        case Model::IV: return MassProfile::lambda_over_rho_sq(coefficient);
        case Model::ConstantMass: return MassProfile::constant();
    }
    throw ConfigError("unknown model");
}

double RadialProblem::target() const { return field.cyclotron() * m_tilde - kz2 - folded_constant(); }

double RadialProblem::folded_constant() const {
    if (const auto* k = std::get_if<Killingbeck>(&potential)) return k->v0;
    return 0.0;
}

RadialProblem make_radial_problem(Model model, double mass_coefficient, const FieldConfig& field,
                                  const RadialPotential& potential, double m_tilde, double kz2) {
    const bool killingbeck = std::holds_alternative<Killingbeck>(potential);
    const bool needs_killingbeck = model == Model::III || model == Model::IV;
    if (killingbeck != needs_killingbeck)
        throw ConfigError(std::string(model_name(model)) + " requires the " +
                          (needs_killingbeck ? "killingbeck" : "pseudoharmonic") + " potential");
    if (const auto* p = std::get_if<Pseudoharmonic>(&potential)) {
        if (!(p->chemical >= 0.0)) throw ConfigError("pseudoharmonic V0 must be >= 0");
        if (!(p->rho0 > 0.0)) throw ConfigError("pseudoharmonic rho0 must be > 0");
    }
    if (!std::isfinite(m_tilde) || !std::isfinite(kz2)) throw ConfigError("m_tilde and kz2 must be finite");
    return RadialProblem{model, mass_profile_for(model, mass_coefficient), field, potential, m_tilde, kz2};
}

double m_tilde(int m, const FieldConfig& field) {
    // Splitting off the nearest integer keeps frac exact; snapping frac makes
    // (m + 1, phi + 2 pi / e) land on exactly the same value as (m, phi).
    const double alpha = field.alpha();
    const double whole = std::nearbyint(alpha);
    const double frac =
        std::ldexp(std::nearbyint(std::ldexp(alpha - whole, kAlphaResolutionBits)), -kAlphaResolutionBits);
    return (static_cast<double>(m) - whole) - frac;
}

double mass_term(const MassProfile& profile, double rho) {
    require_positive_rho(rho);
    if (profile.kind() == MassKind::Constant) return 0.0;
    // g = c rho^p: the ratios g'/g and g''/g depend on p alone, so c cancels exactly.
    const double p = profile.power();
    const double d1 = p / rho;
    const double d2 = p * (p - 1.0) / (rho * rho);
    return 5.0 / 16.0 * d1 * d1 - 0.25 * d2 - 0.25 * d1 / rho;
}

double radial_potential(const RadialPotential& potential, double rho) {
    require_positive_rho(rho);
    return std::visit([rho](const auto& v) { return v(rho); }, potential);
}

double v_eff(const RadialProblem& problem, double rho, double energy) {
    require_positive_rho(rho);
    const double eb = problem.field.cyclotron();
    return radial_potential(problem.potential, rho) + 0.25 * eb * eb * rho * rho - problem.mass.g(rho) * energy +
           mass_term(problem.mass, rho);
}

ConstraintCheck heun_constraint_check(const FieldConfig& field, double v2, double tol) {
    const double eb = field.cyclotron();
    const double gamma_sq = 0.25 * eb * eb + v2;
    const double deviation = std::abs(gamma_sq - 1.0);
    return {deviation <= tol, gamma_sq, deviation};
}

double centrifugal_strength(const RadialProblem& problem, std::optional<double> energy) {
    // mass_term is exactly c / rho^2 for every supported profile.
    const double mass_part = mass_term(problem.mass, 1.0);
    double strength = problem.m_tilde * problem.m_tilde - 0.25 + inverse_square_coefficient(problem.potential) +
                      mass_part;
    if (problem.mass.power() == -2) {
        if (!energy) throw DomainError("centrifugal strength of a 1/rho^2 mass profile depends on E");
        strength -= problem.mass.coefficient() * *energy;
    }
    return strength;
}

double energy_ceiling(const RadialProblem& problem) {
    const double eb = problem.field.cyclotron();
    const double confinement = quadratic_coefficient(problem.potential) + 0.25 * eb * eb;
    switch (problem.mass.power()) {
        case 2:
            return confinement / problem.mass.coefficient();
        case -2:
            if (!(confinement > 0.0)) return -std::numeric_limits<double>::infinity();
            return (centrifugal_strength(problem, 0.0) + 0.25) / problem.mass.coefficient();
        default:
            if (!(confinement > 0.0)) return -std::numeric_limits<double>::infinity();
            return std::numeric_limits<double>::infinity();
    }
}

}  // namespace pdm
