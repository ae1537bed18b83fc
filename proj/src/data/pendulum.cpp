#include <cmath>
#include <numbers>
#include <random>

#include "arn/data/dataset.hpp"

namespace arn::data {

namespace {

constexpr double kG = 9.81;
constexpr double kDtInt = 1e-3;
// Point masses m1 = m2 = 1 on massless rods of length 1; angles measured
// from the downward vertical.

void derivs(const double s[4], double d[4]) {
    double th1 = s[0], w1 = s[1], th2 = s[2], w2 = s[3];
    double delta = th1 - th2;
    double den = 2.0 + 1.0 - std::cos(2.0 * delta);  // 2 m1 + m2 - m2 cos(2 delta)
    d[0] = w1;
    d[1] = (-kG * 3.0 * std::sin(th1) - kG * std::sin(th1 - 2.0 * th2) -
            2.0 * std::sin(delta) * (w2 * w2 + w1 * w1 * std::cos(delta))) /
           den;
    d[2] = w2;
    d[3] = (2.0 * std::sin(delta) *
            (2.0 * w1 * w1 + kG * 2.0 * std::cos(th1) + w2 * w2 * std::cos(delta))) /
           den;
}

}  // namespace

void pendulum_rk4_step(double s[4], double dt) {
    double k1[4], k2[4], k3[4], k4[4], tmp[4];
    derivs(s, k1);
    for (int i = 0; i < 4; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
    derivs(tmp, k2);
    for (int i = 0; i < 4; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
    derivs(tmp, k3);
    for (int i = 0; i < 4; ++i) tmp[i] = s[i] + dt * k3[i];
    derivs(tmp, k4);
    for (int i = 0; i < 4; ++i) s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

double pendulum_energy(const double s[4]) {
    double th1 = s[0], w1 = s[1], th2 = s[2], w2 = s[3];
    double kin = w1 * w1 + 0.5 * w2 * w2 + w1 * w2 * std::cos(th1 - th2);
    double pot = -2.0 * kG * std::cos(th1) - kG * std::cos(th2);
    return kin + pot;
}

Dataset gen_double_pendulum(int nSeries, int nSteps, double dtSample, std::uint64_t seed) {
    if (nSteps < 2) throw DataError("pendulum series need at least 2 timesteps");
    if (dtSample <= 0.0) throw DataError("dtSample must be positive");

    Dataset d;
    d.task = Task::Regression;
    d.n_in = 4;
    d.n_out = 4;
    d.n_t = nSteps;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> velocity(-2.0, 2.0);
    int substeps = std::max(1, static_cast<int>(std::llround(dtSample / kDtInt)));
    double dt = dtSample / substeps;

    for (int si = 0; si < nSeries; ++si) {
        double s[4] = {angle(rng), velocity(rng), angle(rng), velocity(rng)};
        // sample nSteps + 1 points so every step has a next-step target
        std::vector<double> coords;
        coords.reserve(4 * (nSteps + 1));
        for (int t = 0; t <= nSteps; ++t) {
            double x1 = std::sin(s[0]), y1 = -std::cos(s[0]);
            coords.push_back(x1);
            coords.push_back(y1);
            coords.push_back(x1 + std::sin(s[2]));
            coords.push_back(y1 - std::cos(s[2]));
            if (t < nSteps)
                for (int k = 0; k < substeps; ++k) pendulum_rk4_step(s, dt);
        }
        Series ser;
        ser.id = si;
        ser.inputs.assign(coords.begin(), coords.begin() + 4 * nSteps);
        ser.targets.assign(coords.begin() + 4, coords.end());
        d.series.push_back(std::move(ser));
    }
    return d;
}

}  // namespace arn::data
