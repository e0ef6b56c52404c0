#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace homoseg {

struct GradcheckOptions {
    std::uint64_t seed = 0;
    int instances = 100;
    std::vector<std::pair<int, int>> sizes = {{8, 8}};  ///< (width, height)
    double loss_step = 1e-5;
    double model_step = 1e-4;
    double tolerance = 1e-3;
    int c_hidden = 8;
    /// Corrupts the analytic model gradients; the check must then fail.
    bool perturb_weights = false;
};

struct GradcheckBlock {
    std::string name;  ///< e.g. "dice@8x8", "conv1_weights@4x4"
    double max_rel_error = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0;  ///< components whose stencil straddles a kink
    bool passed = false;
};

struct GradcheckReport {
    std::vector<GradcheckBlock> blocks;
    bool passed() const;
};

/// |a - b| / max(|a|, |b|, floor)
double relative_error(double analytic, double numeric, double floor = 1e-6);

/// Magnitude below which a central difference of a loss of the given size
/// is indistinguishable from zero at the checker's tolerance.
double difference_noise_floor(double loss_magnitude, double step);

/// Central finite differences against the analytic gradients of every
/// loss (Dice, CE, DiceCE, smoothness, combined) with respect to the
/// prediction map, and of the combined loss with respect to every model
/// parameter block, on seeded random instances.
GradcheckReport run_gradcheck(const GradcheckOptions& options);

}  // namespace homoseg
