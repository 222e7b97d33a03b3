#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "resact/thermal_circuit.hpp"

namespace resact {

struct FinMaterial {
    double conductivity_w_per_m_k = 400.0;
    double density_kg_per_m3 = 8960.0;

    static FinMaterial copper() { return {400.0, 8960.0}; }
};

/// Rectangular plate fin, discretised into n_segments along its length.
struct FinGeometry {
    double length_m = 0.025;
    double thickness_m = 1.0e-4;
    double width_m = 2.0e-3;
    double conductivity_w_per_m_k = 400.0;
    double density_kg_per_m3 = 8960.0;
    std::size_t n_segments = 50;

    double cross_section_m2() const { return thickness_m * width_m; }
    double perimeter_m() const { return 2.0 * (thickness_m + width_m); }
    void validate() const;
};

struct LadderSegment {
    double conduction_k_per_w;   // series, along the fin
    double convection_k_per_w;   // shunt, to ambient
};

/// Per-segment resistances: dx / (k A_c) and 1 / (h P dx), dx = L / n.
std::vector<LadderSegment> segment_ladder(const FinGeometry& geometry, double h_w_per_m2_k);

/// Base-to-ambient resistance of a T-network ladder with an adiabatic tip: each
/// segment is half conduction, a shunt node, half conduction. Reduction runs from the tip.
double ladder_resistance(std::span<const LadderSegment> ladder);

/// Node excess temperatures of the ladder for a unit base excess, base to tip.
std::vector<double> ladder_node_temperatures(std::span<const LadderSegment> ladder);

/// Adiabatic-tip closed form 1 / (sqrt(h P k A_c) tanh(m L)), m = sqrt(h P / (k A_c)).
double analytic_fin_resistance(const FinGeometry& geometry, double h_w_per_m2_k);

/// attach + single / n_fins.
double array_resistance(double single_fin_k_per_w, std::size_t n_fins, double attach_k_per_w);

/// h (t / 2) / k: thin plate cooled on both faces.
double biot_number(const FinGeometry& geometry, double h_w_per_m2_k);

/// Fin material mass only.
double array_weight(const FinGeometry& geometry, std::size_t n_fins);

struct FinArrayDesign {
    FinGeometry geometry;
    std::size_t n_fins = 1;
    double h_w_per_m2_k = 29.5;
    double attach_resistance_k_per_w = 0.0;
    double total_resistance_k_per_w = 0.0;
    double total_weight_kg = 0.0;
    double max_segment_biot = 0.0;
};

/// Fills the derived fields from the ladder model.
FinArrayDesign evaluate_design(const FinGeometry& geometry, std::size_t n_fins, double h_w_per_m2_k,
                               double attach_resistance_k_per_w = 0.0);

/// Convection coefficient at which the ladder model of `n_fins` identical fins gives
/// `target_total_k_per_w`. Bracketed in [lo, hi].
double calibrate_convection(const FinGeometry& geometry, std::size_t n_fins, double target_total_k_per_w,
                            double attach_resistance_k_per_w = 0.0, double h_lo = 1e-3, double h_hi = 1e4);

struct Interval {
    double lower;
    double upper;
};

struct HeatsinkProblem {
    double target_r_max_k_per_w = 10.0;
    double biot_max = 0.1;
    Interval length_m{0.005, 0.05};
    Interval thickness_m{5.0e-5, 5.0e-4};
    Interval width_m{5.0e-4, 5.0e-3};
    std::size_t n_fins_min = 1;
    std::size_t n_fins_max = 60;
    std::size_t n_segments = 50;
    FinMaterial material;
    double h_w_per_m2_k = 29.5;
    double attach_resistance_k_per_w = 0.0;
    std::size_t starts_per_axis = 4;

    void validate() const;
};

struct HeatsinkOptimum {
    bool feasible = false;
    FinArrayDesign design;
    /// For an infeasible problem: the smallest constraint violation found,
    /// max(R / R_max - 1, Bi / Bi_max - 1).
    double best_violation = 0.0;
    std::size_t evaluations = 0;
};

/// Nested weight minimisation: exhaustive over fin count; for each count a multi-start
/// coordinate descent over (thickness, width) in log space, with the length chosen as
/// the shortest one meeting the resistance target. Ties go to the lowest fin count.
HeatsinkOptimum optimize_heatsink(const HeatsinkProblem& problem);

/// Both design constraints rechecked from the geometry alone.
bool satisfies_constraints(const FinArrayDesign& design, double target_r_max_k_per_w, double biot_max);

struct SystemEffect {
    std::optional<double> time_to_limit_without_s;
    std::optional<double> time_to_limit_with_s;
    std::optional<double> cooling_without_s;
    std::optional<double> cooling_with_s;
    /// Relative changes (with / without - 1); empty when either side is missing.
    std::optional<double> operating_time_change;
    std::optional<double> cooling_time_change;
};

/// Runs the heat-then-cool protocol with and without the heatsink path. The fin case
/// uses rfin in parallel with R4 and C23 replaced by c23_with_fin.
SystemEffect evaluate_design_in_system(double rfin_k_per_w, double c23_with_fin_j_per_k,
                                       const ThermalParams& params, double current_a, double speed_rad_s,
                                       const HeatCoolOptions& options = {});

SystemEffect evaluate_design_in_system(const FinArrayDesign& design, double c23_with_fin_j_per_k,
                                       const ThermalParams& params, double current_a, double speed_rad_s,
                                       const HeatCoolOptions& options = {});

}  // namespace resact
