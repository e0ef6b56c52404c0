#include "homoseg/schedule.hpp"

#include <string>

#include "homoseg/errors.hpp"

namespace homoseg {

namespace {

void check_step(std::int64_t step, std::int64_t total_steps) {
    if (total_steps < 1) {
        throw UsageError("total step count must be >= 1, got " + std::to_string(total_steps));
    }
    if (step < 0 || step > total_steps) {
        throw UsageError("step " + std::to_string(step) + " outside [0, " +
                         std::to_string(total_steps) + "]");
    }
}

}  // namespace

double homotopy_t(std::int64_t step, std::int64_t total_steps, double t_max) {
    check_step(step, total_steps);
    if (!(t_max >= 0.0 && t_max <= 1.0)) {
        throw ConfigError("t_max must lie in [0,1], got " + std::to_string(t_max));
    }
    return t_max * (static_cast<double>(step) / static_cast<double>(total_steps));
}

double linear_lr(double alpha_start, double alpha_end, std::int64_t total_steps, std::int64_t step) {
    check_step(step, total_steps);
    if (step == total_steps) return alpha_end;
    return alpha_start +
           (alpha_end - alpha_start) * (static_cast<double>(step) / static_cast<double>(total_steps));
}

HomotopyState HomotopyState::start(std::int64_t total_steps, double alpha_start, double alpha_end,
                                   double t_max) {
    if (total_steps < 1) throw UsageError("total step count must be >= 1");
    if (!(alpha_start > 0.0) || !(alpha_end > 0.0)) {
        throw ConfigError("learning rates must be > 0");
    }
    if (!(t_max >= 0.0 && t_max <= 1.0)) {
        throw ConfigError("t_max must lie in [0,1], got " + std::to_string(t_max));
    }
    HomotopyState s;
    s.total_steps = total_steps;
    s.alpha_start = alpha_start;
    s.alpha_end = alpha_end;
    s.alpha = alpha_start;
    s.t_max = t_max;
    return s;
}

void HomotopyState::advance_to(std::int64_t completed_step) {
    check_step(completed_step, total_steps);
    step = completed_step;
    alpha = linear_lr(alpha_start, alpha_end, total_steps, step);
    t = homotopy_t(step, total_steps, t_max);
}

}  // namespace homoseg
