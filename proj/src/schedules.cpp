// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/schedules.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ssnaps {

DiffusionSchedule karras_schedule(double sigma_max, double sigma_min,
                                  std::size_t n, double rho) {
    if (!(sigma_max > sigma_min) || !(sigma_min > 0.0))
        throw std::invalid_argument("karras_schedule: need sigma_max > sigma_min > 0");
    if (n < 2) throw std::invalid_argument("karras_schedule: need n >= 2");
    if (!(rho > 0.0)) throw std::invalid_argument("karras_schedule: need rho > 0");

    DiffusionSchedule s;
    s.rho = rho;
    s.sigma_max = sigma_max;
    s.sigma_min = sigma_min;
    s.levels.resize(n);
    const double a = std::pow(sigma_max, 1.0 / rho);
    const double b = std::pow(sigma_min, 1.0 / rho);
    s.levels.front() = sigma_max;
    s.levels.back() = sigma_min;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        s.levels[i] = std::pow(a + t * (b - a), rho);
    }
    return s;
}

DiffusionSchedule inner_ode_grid(double sigma_start, std::size_t n_ode,
                                 double rho, double tau_min) {
    if (!(sigma_start > tau_min))
        throw std::invalid_argument("inner_ode_grid: need sigma_start > tau_min");
    if (n_ode < 1) throw std::invalid_argument("inner_ode_grid: need n_ode >= 1");
    return karras_schedule(sigma_start, tau_min, n_ode + 1, rho);
}

void LangevinConfig::validate() const {
    if (!(eta0 > 0.0)) throw std::invalid_argument("langevin: eta0 must be > 0");
    if (!(delta > 0.0) || delta > 1.0)
        throw std::invalid_argument("langevin: delta must be in (0, 1]");
    if (n_mc < 1) throw std::invalid_argument("langevin: n_mc must be >= 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("langevin: alpha must be > 0");
    if (!(r_scale > 0.0)) throw std::invalid_argument("langevin: r_scale must be > 0");
}

double langevin_step_size(const LangevinConfig& cfg, std::size_t j) {
    if (j >= cfg.n_mc)
        throw std::out_of_range("langevin_step_size: j out of range");
    const double frac = static_cast<double>(j) / static_cast<double>(cfg.n_mc);
    return cfg.eta0 * (cfg.delta + frac * (1.0 - cfg.delta));
}

void write_schedule_csv(std::ostream& os, const DiffusionSchedule& s) {
    os << "sigma\n";
    os.precision(17);
    for (double v : s.levels) os << v << "\n";
}

}  // namespace ssnaps
