#include "phi4trap/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "phi4trap/model.hpp"
#include "phi4trap/stationary.hpp"

namespace phi4trap {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Ground states are immutable once solved; sweeps reuse them across runs.
const StationaryProfile& cached_ground(const SimParams& p) {
    using Key = std::tuple<double, double, double, double>;
    static std::map<Key, std::unique_ptr<StationaryProfile>> cache;
    static std::mutex mtx;
    Key key{p.omega, p.dx, p.x_max, p.newton_tol};
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<StationaryProfile>(solve_ground_state(p)))
                 .first;
    return *it->second;
}

double tracking_window(const SimParams& p) {
    return 0.9 * (p.omega > 0.0 ? tf_support_radius(p.omega) : p.x_max);
}

/// RK4 kernel for u_tt = D2 u - dV/du, free-end closure.
struct Rk4Stepper {
    Grid g;
    StencilOperator d2;
    std::vector<double> trap, a1, a2, a3, a4, tmp;

    explicit Rk4Stepper(const SimParams& p)
        : g(make_grid(p)), d2(g, StencilOperator::Closure::reflect_even),
          trap(g.n()), a1(g.n()), a2(g.n()), a3(g.n()), a4(g.n()), tmp(g.n()) {
        for (int i = 0; i < g.n(); ++i) {
            const double x = g.node(i);
            trap[i] = 0.5 * p.omega * p.omega * x * x;
        }
    }

    void accel(const std::vector<double>& f, std::vector<double>& out) {
        d2.apply(f, out);
        const double* fp = f.data();
        double* op = out.data();
        const double* tp = trap.data();
        const int n = g.n();
        for (int i = 0; i < n; ++i)
            op[i] -= fp[i] * (2.0 * fp[i] * fp[i] - 2.0 + tp[i]);
    }

    void step(FieldState& s, double h) {
        const int n = g.n();
        accel(s.u, a1);
        for (int i = 0; i < n; ++i) tmp[i] = s.u[i] + 0.5 * h * s.w[i];
        accel(tmp, a2);
        for (int i = 0; i < n; ++i)
            tmp[i] = s.u[i] + 0.5 * h * s.w[i] + 0.25 * h * h * a1[i];
        accel(tmp, a3);
        for (int i = 0; i < n; ++i)
            tmp[i] = s.u[i] + h * s.w[i] + 0.5 * h * h * a2[i];
        accel(tmp, a4);
        for (int i = 0; i < n; ++i) {
            s.u[i] += h * s.w[i] + h * h / 6.0 * (a1[i] + a2[i] + a3[i]);
            s.w[i] += h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]);
        }
    }
};

double default_x_esc(const SimParams& p, double x0) {
    const double xs = p.omega > 0.0 ? tf_support_radius(p.omega) : p.x_max;
    return std::min(0.8 * xs, std::abs(x0) + 3.0);
}

/// Streaming outcome classifier. One instance consumes the sampled
/// coordinate (kink position, or pair half-separation) in time order.
class Classifier {
public:
    Classifier(bool pair, double x0, double v_in, double t_max, ClassifyParams cls)
        : pair_(pair), x0_(x0), v_in_(v_in), t_max_(t_max), cls_(cls) {}

    /// Feed one sample; `coord` is NaN when no crossing was found.
    std::optional<Outcome> update(double t, double coord) {
        if (std::isnan(coord)) {
            // Lost track: overlap during a collision if we were close,
            // escape through the window edge if we were far out.
            if (!std::isnan(last_) && std::abs(last_) >= lost_far_) return escape(last_);
            coord = pair_ ? 0.0 : last_;
            if (std::isnan(coord)) return std::nullopt;
        }
        effective_ = coord;

        if (pair_) {
            const bool col = coord <= cls_.x_col;
            if (col && !in_collision_) {
                ++bounces_;
                if (bounces_ > cls_.n_max) return Outcome{OutcomeKind::bion, bounces_};
            }
            in_collision_ = col;
            if (!col && !std::isnan(prev_)) {
                if (coord >= cls_.x_esc && coord > prev_)
                    ++outward_;
                else
                    outward_ = 0;
                if (outward_ >= 2) return escape(coord);
            }
        } else {
            if (!hold_broken_ && std::abs(coord) < cls_.hold_window)
                hold_until_ = t;
            else
                hold_broken_ = true;
            if (!std::isnan(prev_)) {
                if (std::abs(coord) >= cls_.x_esc && std::abs(coord) > std::abs(prev_))
                    ++outward_;
                else
                    outward_ = 0;
                if (outward_ >= 2) return escape(coord);
            }
        }
        prev_ = effective_;
        last_ = effective_;
        return std::nullopt;
    }

    Outcome finalize() const {
        if (pair_) return {bounces_ >= 1 ? OutcomeKind::bion : OutcomeKind::timeout, bounces_};
        if (hold_until_ >= cls_.hold_frac * t_max_)
            return {OutcomeKind::held_at_saddle, 0};
        return {OutcomeKind::timeout, 0};
    }

private:
    Outcome escape(double coord) const {
        if (pair_)
            return {bounces_ >= 1 ? OutcomeKind::n_bounce : OutcomeKind::reflected_no_collision,
                    bounces_};
        const bool right = coord > 0.0;
        if (x0_ != 0.0 && v_in_ > 0.0) {
            // launched at the barrier: same side back out is a reflection,
            // the other side is a transmission
            if ((coord > 0.0) == (x0_ > 0.0)) return {OutcomeKind::reflected_no_collision, 0};
            return {OutcomeKind::transmitted, 0};
        }
        return {right ? OutcomeKind::expelled_right : OutcomeKind::expelled_left, 0};
    }

    bool pair_;
    double x0_, v_in_, t_max_;
    ClassifyParams cls_;
    double lost_far_ = 1.5;  // see update(); pair overlap vs window exit
    int bounces_ = 0, outward_ = 0;
    bool in_collision_ = false, hold_broken_ = false;
    double prev_ = kNaN, last_ = kNaN, effective_ = kNaN, hold_until_ = 0.0;
};

}  // namespace

std::string outcome_label(const Outcome& o) {
    switch (o.kind) {
        case OutcomeKind::expelled_left: return "expelled_left";
        case OutcomeKind::expelled_right: return "expelled_right";
        case OutcomeKind::reflected_no_collision: return "reflected_no_collision";
        case OutcomeKind::transmitted: return "transmitted";
        case OutcomeKind::n_bounce: return "n_bounce(" + std::to_string(o.n_bounces) + ")";
        case OutcomeKind::bion: return "bion";
        case OutcomeKind::held_at_saddle: return "held_at_saddle";
        case OutcomeKind::timeout: return "timeout";
    }
    return "unknown";
}

double TrajectoryRecord::coordinate(std::size_t k) const {
    const auto& p = positions[k];
    if (!pair) return p[0];
    if (std::isnan(p[0]) || std::isnan(p[1])) return kNaN;
    return 0.5 * (p[1] - p[0]);
}

FieldState boost_kink(const SimParams& p, double x0, double v) {
    if (std::abs(v) >= 1.0) throw std::invalid_argument("boost_kink: |v| must be < 1");
    const auto& ground = cached_ground(p);
    const Grid& g = ground.grid;
    const double gamma = 1.0 / std::sqrt(1.0 - v * v);
    FieldState s{0.0, std::vector<double>(g.n()), std::vector<double>(g.n())};
    for (int i = 0; i < g.n(); ++i) {
        const double th = std::tanh(gamma * (g.node(i) - x0));
        s.u[i] = ground.u[i] * th;
        s.w[i] = -v * gamma * ground.u[i] * (1.0 - th * th);
    }
    return s;
}

FieldState boost_kak(const SimParams& p, double x0, double v) {
    if (std::abs(v) >= 1.0) throw std::invalid_argument("boost_kak: |v| must be < 1");
    if (x0 <= 0.0) throw std::invalid_argument("boost_kak: x0 must be > 0");
    const auto& ground = cached_ground(p);
    const Grid& g = ground.grid;
    const double gamma = 1.0 / std::sqrt(1.0 - v * v);
    FieldState s{0.0, std::vector<double>(g.n()), std::vector<double>(g.n())};
    for (int i = 0; i < g.n(); ++i) {
        const double tp = std::tanh(gamma * (g.node(i) + x0));
        const double tm = std::tanh(gamma * (g.node(i) - x0));
        s.u[i] = ground.u[i] * (tp - tm - 1.0);
        s.w[i] = -v * gamma * ground.u[i] * ((1.0 - tp * tp) + (1.0 - tm * tm));
    }
    return s;
}

double discrete_energy(const FieldState& s, const SimParams& p) {
    Grid g(p.x_max, p.dx);
    const int n = g.n();
    if (static_cast<int>(s.u.size()) != n)
        throw std::invalid_argument("discrete_energy: state does not match params grid");
    auto ux = first_derivative(s.u, g);
    std::vector<double> e(n);
    for (int i = 0; i < n; ++i) {
        const double x = g.node(i);
        const double q = s.u[i] * s.u[i] - 1.0;
        e[i] = 0.5 * (s.w[i] * s.w[i] + ux[i] * ux[i] + q * q +
                      0.5 * p.omega * p.omega * x * x * s.u[i] * s.u[i]);
    }
    return quadrature(e, g);
}

std::vector<double> track_positions(const FieldState& s, const SimParams& p,
                                    int expected, double hint) {
    Grid g(p.x_max, p.dx);
    auto crossings = zero_crossings(g, s.u, tracking_window(p));
    if (crossings.empty()) return {};
    if (expected >= 2) {
        if (crossings.size() < 2) return {};
        return {crossings.front(), crossings.back()};
    }
    double best = crossings.front();
    for (double c : crossings)
        if (std::abs(c - hint) < std::abs(best - hint)) best = c;
    return {best};
}

TrajectoryRecord evolve(FieldState state, const SimParams& p, const EvolveOptions& opt) {
    p.validate();
    Rk4Stepper stepper(p);
    const int n = stepper.g.n();
    if (static_cast<int>(state.u.size()) != n || static_cast<int>(state.w.size()) != n)
        throw std::invalid_argument("evolve: state does not match params grid");

    const double t_max = opt.t_max_override > 0.0 ? opt.t_max_override : p.t_max;
    const double h = p.dt;
    const long total_steps = static_cast<long>(std::ceil(t_max / h - 1e-9));

    ClassifyParams cls = opt.cls;
    if (cls.x_esc <= 0.0) cls.x_esc = default_x_esc(p, opt.x0);
    Classifier classifier(opt.pair, opt.x0, opt.v_in, t_max, cls);

    TrajectoryRecord rec;
    rec.pair = opt.pair;

    double hint = opt.pair ? 0.0 : opt.x0;
    double prev_coord = kNaN, prev_prev = kNaN;
    std::optional<Outcome> resolved;

    auto sample = [&](double t) {
        for (double v : state.u)
            if (!std::isfinite(v)) throw BlowUpError(rec.times.empty() ? 0.0 : rec.times.back());
        state.t = t;
        auto pos = track_positions(state, p, opt.pair ? 2 : 1, hint);
        std::array<double, 2> entry{kNaN, kNaN};
        double coord = kNaN;
        if (opt.pair && pos.size() == 2) {
            entry = {pos[0], pos[1]};
            coord = 0.5 * (pos[1] - pos[0]);
        } else if (!opt.pair && pos.size() == 1) {
            entry[0] = pos[0];
            coord = pos[0];
            hint = pos[0];
        }
        rec.times.push_back(t);
        rec.positions.push_back(entry);
        rec.energies.push_back(discrete_energy(state, p));
        if (opt.dump) opt.dump(t, state.u);

        // velocity sign change on the tracked coordinate
        if (!std::isnan(coord) && !std::isnan(prev_coord) && !std::isnan(prev_prev)) {
            const double v1 = prev_coord - prev_prev, v2 = coord - prev_coord;
            if (v1 * v2 < 0.0 && std::abs(v1) > 1e-9 && std::abs(v2) > 1e-9)
                rec.turning_points.emplace_back(rec.times[rec.times.size() - 2], prev_coord);
        }
        prev_prev = prev_coord;
        prev_coord = coord;

        if (!resolved) {
            resolved = classifier.update(t, coord);
            if (resolved) rec.resolve_time = t;
        }
    };

    sample(0.0);
    long k = 0;
    while (k < total_steps && !(resolved && opt.stop_on_resolve)) {
        stepper.step(state, h);
        ++k;
        if (k % opt.sample_every == 0 || k == total_steps) sample(k * h);
    }

    rec.final_time = k * h;
    rec.x0 = opt.x0;
    rec.v_in = opt.v_in;
    rec.t_max = t_max;
    rec.outcome = resolved ? *resolved : classifier.finalize();

    double mean = 0.0;
    for (double e : rec.energies) mean += e;
    mean /= static_cast<double>(rec.energies.size());
    double drift = 0.0;
    for (double e : rec.energies) drift = std::max(drift, std::abs(e - mean));
    rec.energy_mean = mean;
    rec.energy_drift = drift;
    if (drift > 1e-3 * std::max(1.0, std::abs(mean))) throw EnergyDriftError(drift, mean);
    return rec;
}

FieldState integrate_to(FieldState state, const SimParams& p, double t_end) {
    p.validate();
    Rk4Stepper stepper(p);
    if (static_cast<int>(state.u.size()) != stepper.g.n())
        throw std::invalid_argument("integrate_to: state does not match params grid");
    const long steps = static_cast<long>(std::ceil(t_end / p.dt - 1e-9));
    for (long k = 0; k < steps; ++k) stepper.step(state, p.dt);
    state.t += steps * p.dt;
    return state;
}

TrajectoryRecord run_kink(const SimParams& p, double x0, double v_in, EvolveOptions opt) {
    const double v_signed = x0 != 0.0 ? -std::copysign(v_in, x0) : v_in;
    opt.pair = false;
    opt.x0 = x0;
    opt.v_in = v_in;
    return evolve(boost_kink(p, x0, v_signed), p, opt);
}

TrajectoryRecord run_kak(const SimParams& p, double x0, double v_in, EvolveOptions opt) {
    opt.pair = true;
    opt.x0 = x0;
    opt.v_in = v_in;
    return evolve(boost_kak(p, x0, v_in), p, opt);
}

Outcome classify_record(const TrajectoryRecord& rec, const SimParams& p,
                        ClassifyParams cls) {
    if (cls.x_esc <= 0.0) cls.x_esc = default_x_esc(p, rec.x0);
    const double t_max = rec.t_max > 0.0 ? rec.t_max : p.t_max;
    Classifier classifier(rec.pair, rec.x0, rec.v_in, t_max, cls);
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        auto out = classifier.update(rec.times[k], rec.coordinate(k));
        if (out) return *out;
    }
    return classifier.finalize();
}

std::vector<std::pair<double, double>> turning_point_map(
    const SimParams& p, double x0, const std::vector<double>& v_grid,
    std::vector<double>* excluded) {
    std::vector<std::pair<double, double>> out;
    for (double v : v_grid) {
        auto rec = run_kink(p, x0, v);
        if (rec.outcome.kind == OutcomeKind::transmitted) {
            if (excluded) excluded->push_back(v);
            continue;
        }
        double x1 = kNaN;
        for (std::size_t k = 0; k < rec.times.size(); ++k) {
            const double c = rec.coordinate(k);
            if (!std::isnan(c) && (std::isnan(x1) || std::abs(c) < std::abs(x1))) x1 = c;
        }
        if (!std::isnan(x1)) out.emplace_back(x1, 0.5 * v * v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace phi4trap
