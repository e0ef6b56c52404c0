#pragma once

#include <cstdint>

namespace homoseg {

/// t_max * step / total_steps, for 0 <= step <= total_steps.
double homotopy_t(std::int64_t step, std::int64_t total_steps, double t_max = 1.0);

/// alpha_start + (alpha_end - alpha_start) * step / total_steps.
double linear_lr(double alpha_start, double alpha_end, std::int64_t total_steps, std::int64_t step);

/// Bookkeeping for the homotopy training loop: the values held here are
/// the ones the *next* optimisation step uses.
struct HomotopyState {
    std::int64_t step = 0;
    std::int64_t total_steps = 1;
    double t = 0.0;
    double alpha = 0.0;
    double alpha_start = 0.0;
    double alpha_end = 0.0;
    double t_max = 1.0;

    static HomotopyState start(std::int64_t total_steps, double alpha_start, double alpha_end,
                               double t_max = 1.0);

    /// Records completion of `completed_step` (1-based) and recomputes
    /// alpha and t from it.
    void advance_to(std::int64_t completed_step);
};

}  // namespace homoseg
