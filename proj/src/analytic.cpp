#include "pdm/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdm/errors.hpp"

namespace pdm {

namespace {

// |ell| within this of zero is the boundary of the admissible domain.
constexpr double kBorderlineTol = 1e-12;

LevelResult base_level(Model model, const FieldConfig& field, int m, double kz2, int n_rho) {
    if (n_rho < 0) throw DomainError("n_rho must be >= 0");
    LevelResult r;
    r.model = model;
    r.qn = {n_rho, m, 0};
    r.alpha = field.alpha();
    r.m_tilde = m_tilde(m, field);
    r.kz2 = kz2;
    return r;
}

// 2 V0 + e B0 m~ - kz2: the oscillator eigenvalue of the pseudoharmonic models.
double oscillator_count(const FieldConfig& field, const Pseudoharmonic& pot, double mt, double kz2) {
    return 2.0 * pot.chemical + field.cyclotron() * mt - kz2;
}

void check_terminates(LevelResult& r, double v3) {
    HeunParams& p = *r.heun;
    const auto roots = heun_termination_deltas(p.a_t, p.b_t, r.qn.n_rho);
    const auto match = std::find_if(roots.begin(), roots.end(), [&](double root) {
        return std::abs(2.0 * v3 - root) <= kTerminationTol * std::max(1.0, std::abs(root));
    });
    r.termination_ok = match != roots.end();
    if (!r.termination_ok) {
        r.note = "H_B does not terminate: 2 V3 is not a termination root";
        return;
    }
    // The closed-form eigenfunction is the polynomial at the matched root;
    // any remaining mismatch in V3 shows up in the residual of the radial equation.
    p.d_t = *match;
}

void require_unit_gamma(const FieldConfig& field, const Killingbeck& pot) {
    const auto check = heun_constraint_check(field, pot.v2);
    if (!check.pass)
        throw ConfigError("Heun reduction needs e^2 B0^2 / 4 + V2 = 1, got " + std::to_string(check.gamma_sq));
}

}  // namespace

double kz2_infinite_well(double width, int n_z) {
    if (!(width > 0.0)) throw DomainError("well width L must be > 0");
    if (n_z < 0) throw DomainError("n_z must be >= 0");
    const double k = (n_z + 1) * kPi / width;
    return k * k;
}

double morse_exponent(double depth, double range, int n_z) {
    if (!(depth > 0.0) || !(range > 0.0)) throw DomainError("Morse D and sigma must be > 0");
    if (n_z < 0) throw DomainError("n_z must be >= 0");
    const double s = std::sqrt(depth) / range - n_z - 0.5;
    if (!(s > 0.0)) throw NoStateError("Morse well has no bound state n_z = " + std::to_string(n_z));
    return s;
}

double kz2_morse(double depth, double range, int n_z) {
    const double s = morse_exponent(depth, range, n_z);
    return -range * range * s * s;
}

double kz2_morse_paper_literal(double depth, double range, int n_z) {
    const double s = morse_exponent(depth, range, n_z);
    return s * s;
}

double kz2_for(const ZModel& z, int n_z) {
    if (const auto* w = std::get_if<InfiniteWell>(&z)) return kz2_infinite_well(w->width, n_z);
    if (const auto* m = std::get_if<Morse>(&z)) return kz2_morse(m->depth, m->range, n_z);
    if (n_z != 0) throw NoStateError("a fixed kz2 channel has only n_z = 0");
    return std::get<FixedKz2>(z).value;
}

double z_eigenfunction(const ZModel& z, int n_z, double z_coord) {
    if (const auto* w = std::get_if<InfiniteWell>(&z)) {
        if (!(w->width > 0.0)) throw DomainError("well width L must be > 0");
        if (z_coord < 0.0 || z_coord > w->width) throw DomainError("z outside the well [0, L]");
        if (z_coord == 0.0 || z_coord == w->width) return 0.0;
        return std::sin((n_z + 1) * kPi * z_coord / w->width);
    }
    if (const auto* m = std::get_if<Morse>(&z)) {
        const double s = morse_exponent(m->depth, m->range, n_z);
        const double y = 2.0 * std::sqrt(m->depth) / m->range * std::exp(-m->range * z_coord);
        if (y == 0.0) return 0.0;
        return std::exp(s * std::log(y) - 0.5 * y) * laguerre(n_z, 2.0 * s, y);
    }
    return 1.0;
}

LevelResult model1_energy(double eta, const FieldConfig& field, const Pseudoharmonic& pot, int m, double kz2,
                          int n_rho) {
    if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
    LevelResult r = base_level(Model::I, field, m, kz2, n_rho);
    const double mt = r.m_tilde;
    const double count = oscillator_count(field, pot, mt, kz2);
    r.ell = std::sqrt(mt * mt + pot.v2() + 0.25);
    const double eb = field.cyclotron();
    const double frequency = count / (2.0 * n_rho + 1.0 + r.ell);
    const double energy = (4.0 * pot.v1() + eb * eb - frequency * frequency) / (4.0 * eta);
    if (!(count > 0.0)) {
        // Squaring hides the sign of the frequency; keep the formula value for reports.
        r.energy_paper_literal = energy;
        r.note = "2 V0 + e B0 m~ - kz2 <= 0: no positive oscillator frequency";
        return r;
    }
    r.omega = frequency;
    r.energy = energy;
    r.precondition_ok = true;
    r.normalizable = true;
    return r;
}

LevelResult model2_energy(double eta, const FieldConfig& field, const Pseudoharmonic& pot, int m, double kz2,
                          int n_rho) {
    if (!(eta > 0.0)) throw ConfigError("eta must be > 0");
    LevelResult r = base_level(Model::II, field, m, kz2, n_rho);
    const double mt = r.m_tilde;
    const double eb = field.cyclotron();
    r.omega = std::sqrt(4.0 * pot.v1() + eb * eb);
    if (!(r.omega > 0.0)) {
        r.note = "no confinement: 4 V1 + e^2 B0^2 = 0";
        return r;
    }
    const double bracket = oscillator_count(field, pot, mt, kz2) / r.omega - (2.0 * n_rho + 1.0);
    r.ell = bracket;
    const double scale = 2.0 * n_rho + 1.0;
    if (std::abs(bracket) <= kBorderlineTol * scale) {
        r.ell = 0.0;
        r.borderline = true;
        r.note = "|l~| = 0: boundary of the admissible domain";
    } else if (bracket < 0.0) {
        r.energy_paper_literal = (mt * mt + pot.v2() + 0.25 - bracket * bracket) / eta;
        r.note = "bracket (count / omega - 2 n_rho - 1) is negative";
        return r;
    }
    r.energy = (mt * mt + pot.v2() + 0.25 - r.ell * r.ell) / eta;
    r.precondition_ok = true;
    r.normalizable = r.ell > 0.0;
    return r;
}

LevelResult model3_energy(double lambda, const FieldConfig& field, const Killingbeck& pot, int m, double kz2,
                          int n_rho) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
    require_unit_gamma(field, pot);
    LevelResult r = base_level(Model::III, field, m, kz2, n_rho);
    const double mt = r.m_tilde;
    const double root_term = std::sqrt(mt * mt + pot.v4 + 1.0 / 16.0);
    if (!std::isfinite(root_term)) {
        r.note = "m~^2 + V4 + 1/16 < 0";
        return r;
    }
    const double radicand = 2.0 * (n_rho + 1.0 + root_term) - field.cyclotron() * mt + kz2 + pot.v0;
    if (radicand < 0.0) {
        r.note = "radicand D < 0";
        return r;
    }
    const double energy = (pot.v1 + 2.0 * std::sqrt(radicand)) / lambda;
    r.energy = energy;
    if (pot.v1 + 2.0 * radicand >= 0.0) r.energy_paper_literal = std::sqrt(pot.v1 + 2.0 * radicand) / lambda;
    const double a_t = 2.0 * root_term;
    r.heun = HeunParams{a_t, pot.v1 - lambda * energy, a_t + 2.0 + 2.0 * n_rho, 2.0 * pot.v3};
    r.precondition_ok = true;
    check_terminates(r, pot.v3);
    r.normalizable = r.termination_ok;
    return r;
}

LevelResult model4_energy(double lambda, const FieldConfig& field, const Killingbeck& pot, int m, double kz2,
                          int n_rho) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
    require_unit_gamma(field, pot);
    LevelResult r = base_level(Model::IV, field, m, kz2, n_rho);
    const double mt = r.m_tilde;
    const double g_t = field.cyclotron() * mt - kz2 - pot.v0 + 0.25 * pot.v1 * pot.v1;
    const double a_t = g_t - 2.0 - 2.0 * n_rho;
    const double base = mt * mt + pot.v4 + 0.25;
    r.energy_paper_literal = (base - a_t * a_t) / lambda;
    if (!(a_t > 0.0)) {
        r.note = "alpha~ = gamma~ - 2 - 2 n_rho <= 0";
        return r;
    }
    r.energy = (base - 0.25 * a_t * a_t) / lambda;
    r.heun = HeunParams{a_t, pot.v1, g_t, 2.0 * pot.v3};
    r.precondition_ok = true;
    check_terminates(r, pot.v3);
    r.normalizable = r.termination_ok;
    return r;
}

LevelResult constant_mass_energy(const FieldConfig& field, const Pseudoharmonic& pot, int m, double kz2,
                                 int n_rho) {
    LevelResult r = base_level(Model::ConstantMass, field, m, kz2, n_rho);
    const double mt = r.m_tilde;
    const double eb = field.cyclotron();
    r.omega = std::sqrt(4.0 * pot.v1() + eb * eb);
    r.ell = std::sqrt(mt * mt + pot.v2());
    if (!(r.omega > 0.0)) {
        r.note = "no confinement: 4 V1 + e^2 B0^2 = 0";
        return r;
    }
    r.energy = r.omega * (2.0 * n_rho + r.ell + 1.0) - oscillator_count(field, pot, mt, kz2);
    r.precondition_ok = true;
    r.normalizable = true;
    return r;
}

RadialFunction::RadialFunction(const LevelResult& level) : level_(level) {
    if (!level.valid()) throw DomainError("radial function requested for an invalid level");
    switch (level.model) {
        case Model::I:
            u_power_ = 0.5 + level.ell;
            r_power_ = 1.0 + level.ell;
            break;
        case Model::II:
            u_power_ = 0.5 + level.ell;
            r_power_ = -1.0 + level.ell;
            break;
        case Model::ConstantMass:
            u_power_ = 0.5 + level.ell;
            r_power_ = level.ell;
            break;
        case Model::III:
            u_power_ = 0.5 * (1.0 + level.heun->a_t);
            r_power_ = u_power_;
            break;
        case Model::IV:
            u_power_ = 0.5 * (1.0 + level.heun->a_t);
            r_power_ = 0.5 * (level.heun->a_t - 2.0);
            break;
    }
    if (level.heun) series_ = heun_coeffs(*level.heun);
}

Jet RadialFunction::eval(const Jet& rho, bool reduced) const {
    if (!(rho.v > 0.0)) throw DomainError("radial function needs rho > 0");
    const Jet lead = pow(rho, reduced ? u_power_ : r_power_);
    if (series_) {
        const double b = level_.heun->b_t;
        return lead * exp(-0.5 * (b * rho + rho * rho)) * heun_eval_jet(*series_, rho);
    }
    const double w = level_.omega;
    const Jet x = 0.5 * w * rho * rho;
    return lead * exp(-0.5 * x) * kummer_terminating(level_.qn.n_rho, level_.ell + 1.0, x);
}

double radial_R(const LevelResult& level, double rho) { return RadialFunction(level).R(rho); }

LevelResult total_energy(const SystemSpec& spec, const QuantumNumbers& qn) {
    double kz2 = 0.0;
    try {
        kz2 = kz2_for(spec.z, qn.n_z);
    } catch (const NoStateError& e) {
        LevelResult r = base_level(spec.model, spec.field, qn.m, std::nan(""), qn.n_rho);
        r.qn = qn;
        r.note = e.what();
        return r;
    }
    LevelResult r;
    switch (spec.model) {
        case Model::I:
            r = model1_energy(spec.mass_coefficient, spec.field, std::get<Pseudoharmonic>(spec.potential), qn.m, kz2,
                              qn.n_rho);
            break;
        case Model::II:
            r = model2_energy(spec.mass_coefficient, spec.field, std::get<Pseudoharmonic>(spec.potential), qn.m, kz2,
                              qn.n_rho);
            break;
        case Model::III:
            r = model3_energy(spec.mass_coefficient, spec.field, std::get<Killingbeck>(spec.potential), qn.m, kz2,
                              qn.n_rho);
            break;
        case Model::IV:
            r = model4_energy(spec.mass_coefficient, spec.field, std::get<Killingbeck>(spec.potential), qn.m, kz2,
                              qn.n_rho);
            break;
        case Model::ConstantMass:
            r = constant_mass_energy(spec.field, std::get<Pseudoharmonic>(spec.potential), qn.m, kz2, qn.n_rho);
            break;
    }
    r.qn = qn;
    return r;
}

RadialProblem radial_problem(const SystemSpec& spec, const LevelResult& level) {
    return make_radial_problem(spec.model, spec.mass_coefficient, spec.field, spec.potential, level.m_tilde,
                               level.kz2);
}

LinearOde reduced_ode(const RadialProblem& problem, double energy) {
    const double centrifugal = problem.m_tilde * problem.m_tilde - 0.25;
    const double target = problem.target();
    return LinearOde{{
        {2, [](double) { return -1.0; }},
        {0, [centrifugal](double r) { return centrifugal / (r * r); }},
        {0, [problem, energy](double r) { return v_eff(problem, r, energy) - problem.folded_constant(); }},
        {0, [target](double) { return -target; }},
    }};
}

std::complex<double> total_wavefunction(const SystemSpec& spec, const LevelResult& level, double rho, double phi,
                                        double z) {
    const double radial = radial_R(level, rho);
    const double axial = z_eigenfunction(spec.z, level.qn.n_z, z);
    return radial * axial * std::polar(1.0, level.qn.m * phi);
}

std::vector<LevelResult> spectrum_table(const SystemSpec& spec, const LevelRanges& ranges) {
    std::vector<LevelResult> table;
    for (int nz = ranges.n_z.lo; nz <= ranges.n_z.hi; ++nz)
        for (int m = ranges.m.lo; m <= ranges.m.hi; ++m)
            for (int n = ranges.n_rho.lo; n <= ranges.n_rho.hi; ++n) table.push_back(total_energy(spec, {n, m, nz}));
    return table;
}

std::vector<LevelResult> sorted_by_energy(const std::vector<LevelResult>& table) {
    std::vector<LevelResult> out;
    std::copy_if(table.begin(), table.end(), std::back_inserter(out), [](const auto& r) { return r.valid(); });
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return *a.energy < *b.energy; });
    return out;
}

}  // namespace pdm
