// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace ssnaps {

// Descending noise-level ladder. Endpoints are assigned directly from
// sigma_max / sigma_min so they never carry pow() round-off.
struct DiffusionSchedule {
    std::vector<double> levels;
    double rho = 0.0;
    double sigma_max = 0.0;
    double sigma_min = 0.0;

    std::size_t size() const { return levels.size(); }
    double operator[](std::size_t i) const { return levels[i]; }
};

// levels[i] = (smax^(1/rho) + i/(n-1) * (smin^(1/rho) - smax^(1/rho)))^rho
DiffusionSchedule karras_schedule(double sigma_max, double sigma_min,
                                  std::size_t n, double rho);

// Grid for the inner probability-flow solve: n_ode + 1 levels from
// sigma_start down to tau_min, same curvature family.
DiffusionSchedule inner_ode_grid(double sigma_start, std::size_t n_ode,
                                 double rho = 7.0, double tau_min = 1e-5);

// Denominator conventions for the two Langevin gradient terms. The anchor
// term divides by sigma^2 or by 2*r^2; the data term by alpha^2 or 2*alpha^2.
enum class AnchorDenom { sigma_sq, two_r_sq };
enum class DataDenom { alpha_sq, two_alpha_sq };

struct LangevinConfig {
    double eta0 = 1e-6;   // base step size
    double delta = 0.01;  // decay ratio in (0, 1]
    std::size_t n_mc = 50;
    double alpha = 5e-4;   // likelihood scale
    double r_scale = 1.0;  // r = r_scale * sigma
    AnchorDenom anchor_denom = AnchorDenom::sigma_sq;
    DataDenom data_denom = DataDenom::alpha_sq;

    void validate() const;  // throws std::invalid_argument

    double r_tau(double sigma) const { return r_scale * sigma; }
    double anchor_denominator(double sigma) const {
        if (anchor_denom == AnchorDenom::sigma_sq) return sigma * sigma;
        const double r = r_tau(sigma);
        return 2.0 * r * r;
    }
    double data_denominator() const {
        return data_denom == DataDenom::alpha_sq ? alpha * alpha
                                                 : 2.0 * alpha * alpha;
    }
};

// eta_j = eta0 * (delta + j/n_mc * (1 - delta)); nondecreasing in j.
double langevin_step_size(const LangevinConfig& cfg, std::size_t j);

// One "sigma" column, one level per row.
void write_schedule_csv(std::ostream& os, const DiffusionSchedule& s);

}  // namespace ssnaps
