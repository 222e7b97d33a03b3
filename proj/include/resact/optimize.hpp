#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace resact::optim {

/// Axis-aligned search box. lower == upper pins a coordinate.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dim() const { return lower.size(); }
    void validate() const;
    std::vector<double> clamp(std::span<const double> x) const;
};

using Objective = std::function<double(std::span<const double>)>;

/// Generational GA: tournament selection, blend (BLX-alpha) crossover, gaussian
/// mutation scaled to the box, elitism. The first individual is the seed point.
struct GaConfig {
    std::uint64_t seed = 1;
    std::size_t population = 50;
    std::size_t generations = 100;
    std::size_t tournament_size = 3;
    std::size_t elite_count = 2;
    double blend_alpha = 0.5;
    double mutation_rate = 0.1;   // per gene
    double mutation_scale = 0.1;  // sigma as a fraction of the box width
    unsigned jobs = 1;            // population members evaluated concurrently
};

struct OptimizeResult {
    std::vector<double> best;
    double best_value = 0.0;
    std::size_t generations = 0;
    std::size_t evaluations = 0;
};

OptimizeResult genetic_minimize(const Objective& f, const Box& box, std::span<const double> seed_point,
                                const GaConfig& config);

struct NelderMeadConfig {
    std::size_t max_evaluations = 800;
    double initial_step = 0.05;  // fraction of the box width
    double tolerance = 1e-14;    // on the simplex value spread, relative
    std::size_t restarts = 2;
};

/// Nelder-Mead in box-normalised coordinates; trial points are projected onto the box.
OptimizeResult nelder_mead_minimize(const Objective& f, const Box& box, std::span<const double> start,
                                    const NelderMeadConfig& config = {});

}  // namespace resact::optim
