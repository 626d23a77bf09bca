#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpf/particles.hpp"

namespace fpf {

namespace {

// Positions drawn on (a,b): Poisson cloud via exponential spacings.
std::vector<double> poisson_cloud(double a, double b, double lambda, Rng& rng) {
    std::vector<double> x;
    double pos = a;
    while (true) {
        pos += rng.exponential(lambda);
        if (pos >= b) break;
        x.push_back(pos);
    }
    return x;
}

void validate(double theta, double dt, double t_end) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("simulate: theta must lie in [0,1]");
    if (!(dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
    if (dt > t_end) throw std::invalid_argument("simulate: dt exceeds the time horizon");
}

std::vector<double> initial_positions(const InitSpec& init, double dt, Rng& rng) {
    if (!(init.b > init.a)) throw std::invalid_argument("simulate: need b > a in InitSpec");
    // Maximal occupation: spacing a small fraction of the per-step relative
    // diffusion length sqrt(2 dt), so the cloud relaxes to the entrance law.
    const double lambda =
        init.kind == InitKind::maximal ? 50.0 / std::sqrt(2.0 * dt) : init.lambda;
    if (!(lambda > 0.0)) throw std::invalid_argument("simulate: need positive intensity");
    auto x = poisson_cloud(init.a, init.b, lambda, rng);
    std::sort(x.begin(), x.end());
    return x;
}

// Independent standard-Brownian moves over one step (variance dt).
std::vector<double> diffuse(const std::vector<double>& x, double dt, Rng& rng) {
    const double sd = std::sqrt(dt);
    std::vector<double> moved(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) moved[i] = x[i] + sd * rng.normal();
    return moved;
}

// Neighbor reactions given pre- and post-move positions.  A pair meets when
// the gap bridge touches zero: certainly if the order flipped, else with
// probability exp(-d0 d1 / dt) (relative coordinate has variance 2 dt).  A
// meeting pair annihilates with probability theta, otherwise coalesces to
// the midpoint of the moved positions.
void react(ParticleState& st, const std::vector<double>& pre, std::vector<double>& moved,
           double theta, double dt, Rng& rng) {
    const std::size_t n = pre.size();
    std::vector<double> next;
    next.reserve(n);
    std::size_t i = 0;
    while (i < n) {
        if (i + 1 == n) {
            next.push_back(moved[i]);
            break;
        }
        const double d0 = pre[i + 1] - pre[i];
        const double d1 = moved[i + 1] - moved[i];
        bool meet = d1 <= 0.0;
        if (!meet && d0 * d1 < 700.0 * dt) meet = rng.uniform() < std::exp(-d0 * d1 / dt);
        if (meet) {
            if (rng.uniform() < theta) {
                ++st.n_annihilate;
            } else {
                ++st.n_coalesce;
                next.push_back(0.5 * (moved[i] + moved[i + 1]));
            }
            i += 2;
        } else {
            next.push_back(moved[i]);
            ++i;
        }
    }
    std::sort(next.begin(), next.end());
    st.x = std::move(next);
}

}  // namespace

ParticleState simulate_cabm(double theta, const InitSpec& init, double t_end, double dt,
                            std::uint64_t seed) {
    validate(theta, dt, t_end);
    Rng rng(seed, 21);
    ParticleState st;
    st.x = initial_positions(init, dt, rng);
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(t_end / dt));
    for (std::size_t s = 0; s < n_steps; ++s) {
        const std::vector<double> pre = st.x;
        std::vector<double> moved = diffuse(pre, dt, rng);
        react(st, pre, moved, theta, dt, rng);
        st.t += dt;
    }
    return st;
}

ParticleState thin(const ParticleState& state, double p, Rng& rng) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("thin: need p in (0,1]");
    ParticleState out;
    out.t = state.t;
    out.n_coalesce = state.n_coalesce;
    out.n_annihilate = state.n_annihilate;
    out.x.reserve(state.x.size());
    for (double xi : state.x)
        if (rng.uniform() < p) out.x.push_back(xi);
    return out;
}

ExitRecord simulate_exit(double theta, const InitSpec& init, double T, double dt,
                         std::uint64_t seed) {
    validate(theta, dt, T);
    Rng rng(seed, 22);
    ParticleState st;
    st.x = initial_positions(init, dt, rng);
    ExitRecord rec;
    const std::size_t n_steps = static_cast<std::size_t>(std::llround(T / dt));
    for (std::size_t s = 0; s < n_steps && !st.x.empty(); ++s) {
        const std::vector<double> pre = st.x;
        std::vector<double> moved = diffuse(pre, dt, rng);
        // Absorbing boundary at 0: a particle crosses if its endpoint went
        // non-positive or its one-sided bridge touched 0 within the step
        // (probability exp(-2 x0 x1 / dt) for endpoints x0, x1 > 0).
        for (std::size_t i = 0; i < pre.size() && !rec.crossed; ++i) {
            if (moved[i] <= 0.0) {
                rec.crossed = true;
            } else if (2.0 * pre[i] * moved[i] < 700.0 * dt) {
                if (rng.uniform() < std::exp(-2.0 * pre[i] * moved[i] / dt))
                    rec.crossed = true;
            }
        }
        if (rec.crossed) {
            rec.first_crossing_time = st.t + dt;
            rec.n_alive = st.x.size();
            return rec;
        }
        react(st, pre, moved, theta, dt, rng);
        st.t += dt;
    }
    rec.n_alive = st.x.size();
    return rec;
}

}  // namespace fpf
