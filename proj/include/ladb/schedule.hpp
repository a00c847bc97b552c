#pragma once

#include <string>

#include "ladb/vec.hpp"

namespace ladb {

enum class ScheduleKind { vp };

ScheduleKind schedule_kind_from_string(const std::string& s);
std::string to_string(ScheduleKind k);

// Coefficients of the variance-preserving forward process at one time.
struct ScheduleEval {
    double alpha;    // signal scale, exp(-1/2 * integral of beta)
    double sigma;    // noise scale, sqrt(1 - alpha^2)
    double f_scale;  // drift is f_scale * x
    double g;        // diffusion coefficient
};

// Linear-beta variance-preserving schedule on t in [0, 1].
struct NoiseSchedule {
    double beta_min = 0.1;
    double beta_max = 20.0;
    ScheduleKind kind = ScheduleKind::vp;

    // beta_min = beta_max = 0 is allowed: it degenerates to the identity
    // process, which the integrator tests rely on.
    void validate() const;

    double beta(double t) const;
    double beta_integral(double t) const;  // closed-form integral of beta over [0, t]
    ScheduleEval eval(double t) const;

    double alpha(double t) const { return eval(t).alpha; }
    double sigma(double t) const { return eval(t).sigma; }
};

// Interpolant alpha_t * x0 + sigma_t * x1 between a data point and a noise draw.
Vec perturb(const NoiseSchedule& schedule, const Vec& x0, const Vec& x1, double t);

}  // namespace ladb
