#include "ladb/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace ladb {

ScheduleKind schedule_kind_from_string(const std::string& s) {
    if (s == "vp") return ScheduleKind::vp;
    throw std::invalid_argument("unknown schedule kind: " + s);
}

std::string to_string(ScheduleKind) { return "vp"; }

void NoiseSchedule::validate() const {
    if (!std::isfinite(beta_min) || !std::isfinite(beta_max)) {
        throw std::invalid_argument("NoiseSchedule: beta bounds must be finite");
    }
    if (beta_min < 0.0) throw std::invalid_argument("NoiseSchedule: beta_min must be non-negative");
    if (beta_max < beta_min) {
        throw std::invalid_argument("NoiseSchedule: beta_max must be >= beta_min");
    }
}

namespace {
void check_time(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw std::invalid_argument("NoiseSchedule: t must lie in [0, 1], got " +
                                    std::to_string(t));
    }
}
}  // namespace

double NoiseSchedule::beta(double t) const {
    check_time(t);
    return beta_min + t * (beta_max - beta_min);
}

double NoiseSchedule::beta_integral(double t) const {
    check_time(t);
    return beta_min * t + 0.5 * t * t * (beta_max - beta_min);
}

ScheduleEval NoiseSchedule::eval(double t) const {
    validate();
    const double bt = beta(t);
    const double integral = beta_integral(t);
    ScheduleEval e;
    e.alpha = std::exp(-0.5 * integral);
    // sigma^2 = 1 - alpha^2 = -expm1(-integral), accurate for small t
    e.sigma = std::sqrt(-std::expm1(-integral));
    e.f_scale = -0.5 * bt;
    e.g = std::sqrt(bt);
    return e;
}

Vec perturb(const NoiseSchedule& schedule, const Vec& x0, const Vec& x1, double t) {
    require_same_dim(x0, x1, "perturb");
    const ScheduleEval e = schedule.eval(t);
    Vec out(x0.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = e.alpha * x0[i] + e.sigma * x1[i];
    return out;
}

}  // namespace ladb
