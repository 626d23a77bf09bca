// Interacting Brownian particle simulators: coalescing/annihilating motions
// (pairwise reaction with probability theta), boundary-exit runs, and
// independent thinning.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fpf/rng.hpp"

namespace fpf {

struct ParticleState {
    std::vector<double> x;  // sorted positions
    double t = 0.0;
    std::uint64_t n_coalesce = 0;
    std::uint64_t n_annihilate = 0;
};

enum class InitKind { maximal, poisson };

struct InitSpec {
    InitKind kind = InitKind::maximal;
    double lambda = 0.0;  // poisson intensity; ignored for maximal
    double a = 0.0, b = 0.0;  // initial occupation window
};

// Evolve reacting Brownian motions to time t_end with Euler steps of size dt.
// Pairs meet with the Brownian-bridge collision probability; a meeting pair
// annihilates with probability theta, otherwise coalesces to the midpoint.
// The maximal initial condition is realized as a dense Poisson cloud of
// intensity 50/sqrt(2 dt) (several per-step diffusion lengths apart), which
// relaxes to the entrance law within a few steps.  Throws
// std::invalid_argument for dt <= 0, dt > t_end, or theta outside [0,1].
ParticleState simulate_cabm(double theta, const InitSpec& init, double t_end,
                            double dt, std::uint64_t seed);

// Independent thinning: keep each particle with probability p.
ParticleState thin(const ParticleState& state, double p, Rng& rng);

// Reacting system on (0, inf) with an absorbing boundary at 0, run to time T;
// records whether any particle crossed and when.  Initial data on (a, a+width).
struct ExitRecord {
    bool crossed = false;
    double first_crossing_time = 0.0;
    std::size_t n_alive = 0;
};
ExitRecord simulate_exit(double theta, const InitSpec& init, double T,
                         double dt, std::uint64_t seed);

}  // namespace fpf
