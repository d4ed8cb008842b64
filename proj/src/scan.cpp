#include "phi4trap/scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

namespace phi4trap {

namespace {

// outcomes compare equal for window purposes when kind and bounce count match
bool same_outcome(const Outcome& a, const Outcome& b) {
    return a.kind == b.kind && (a.kind != OutcomeKind::n_bounce || a.n_bounces == b.n_bounces);
}

SweepPoint classify_at(const SimParams& p, double x0, double v) {
    SweepPoint pt;
    pt.v = v;
    try {
        auto rec = run_kak(p, x0, v);
        pt.outcome = rec.outcome;
        pt.t_resolve = rec.resolve_time >= 0.0 ? rec.resolve_time : rec.final_time;
    } catch (const BlowUpError& e) {
        pt.flagged = true;
        pt.t_resolve = e.last_stable_time;
    } catch (const EnergyDriftError&) {
        pt.flagged = true;
    }
    return pt;
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

std::vector<SweepPoint> sweep_velocities(const SimParams& p, double x0, double v_lo,
                                         double v_hi, double coarse_step, int threads) {
    if (!(v_lo < v_hi) || v_hi >= 1.0)
        throw std::invalid_argument("sweep_velocities: need v_lo < v_hi < 1");
    if (coarse_step <= 0.0) throw std::invalid_argument("sweep_velocities: bad step");
    std::vector<double> vs;
    for (double v = v_lo; v <= v_hi + 1e-12; v += coarse_step) vs.push_back(v);
    // result slots are keyed by index, so scheduling order cannot matter
    std::vector<SweepPoint> out(vs.size());
    parallel_for(static_cast<int>(vs.size()), threads,
                 [&](int i) { out[i] = classify_at(p, x0, vs[i]); });
    return out;
}

namespace {

struct Edge {
    double lo, hi;       // bracket after bisection, hi - lo <= edge_tol
    bool uncertain = false;
};

/// Bisect between two velocities with different outcomes. A midpoint
/// classifying to neither side exposes sub-window structure; it replaces the
/// upper side and the edge is marked uncertain.
Edge bisect_edge(const SimParams& p, double x0, double lo, Outcome out_lo, double hi,
                 Outcome out_hi, double tol) {
    Edge e{lo, hi};
    int guard = 0;
    while (e.hi - e.lo > tol && guard++ < 60) {
        const double mid = 0.5 * (e.lo + e.hi);
        auto pt = classify_at(p, x0, mid);
        if (pt.flagged) {
            e.uncertain = true;
            break;
        }
        if (same_outcome(pt.outcome, out_lo)) {
            e.lo = mid;
        } else {
            if (!same_outcome(pt.outcome, out_hi)) e.uncertain = true;
            e.hi = mid;
            out_hi = pt.outcome;
        }
    }
    return e;
}

}  // namespace

WindowTable refine_window_edges(const std::vector<SweepPoint>& sweep, const SimParams& p,
                                double x0, double edge_tol, int threads) {
    if (sweep.size() < 2) throw std::invalid_argument("refine_window_edges: sweep too small");
    bool any_transition = false;
    for (std::size_t i = 0; i + 1 < sweep.size(); ++i)
        if (!same_outcome(sweep[i].outcome, sweep[i + 1].outcome)) any_transition = true;
    if (!any_transition)
        throw std::invalid_argument("refine_window_edges: sweep has no outcome transition");

    WindowTable table;
    table.omega = p.omega;
    table.x0 = x0;
    table.v_lo = sweep.front().v;
    table.v_hi = sweep.back().v;
    table.coarse_step = sweep.size() > 1 ? sweep[1].v - sweep[0].v : 0.0;
    table.edge_tol = edge_tol;

    // maximal groups of identical classification
    struct Group {
        std::size_t first, last;
    };
    std::vector<Group> groups;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        if (!groups.empty() &&
            same_outcome(sweep[groups.back().first].outcome, sweep[i].outcome) &&
            !sweep[i].flagged)
            groups.back().last = i;
        else
            groups.push_back({i, i});
    }

    struct Task {
        std::size_t gi;       // window group index
        bool left;            // which edge
        Edge edge;
    };
    std::vector<Task> tasks;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& out = sweep[groups[gi].first].outcome;
        if (out.kind != OutcomeKind::n_bounce || sweep[groups[gi].first].flagged) continue;
        if (groups[gi].first > 0) tasks.push_back({gi, true, {}});
        if (groups[gi].last + 1 < sweep.size()) tasks.push_back({gi, false, {}});
    }

    parallel_for(static_cast<int>(tasks.size()), threads, [&](int ti) {
        auto& task = tasks[ti];
        const auto& g = groups[task.gi];
        if (task.left) {
            const auto& prev = sweep[g.first - 1];
            task.edge = bisect_edge(p, x0, prev.v, prev.outcome, sweep[g.first].v,
                                    sweep[g.first].outcome, edge_tol);
        } else {
            const auto& next = sweep[g.last + 1];
            task.edge = bisect_edge(p, x0, sweep[g.last].v, sweep[g.last].outcome, next.v,
                                    next.outcome, edge_tol);
        }
    });

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const auto& g = groups[gi];
        const auto& out = sweep[g.first].outcome;
        if (out.kind != OutcomeKind::n_bounce || sweep[g.first].flagged) continue;
        WindowRow row;
        row.n = out.n_bounces;
        row.v1 = sweep[g.first].v;
        row.v2 = sweep[g.last].v;
        for (const auto& task : tasks) {
            if (task.gi != gi) continue;
            // windows stay disjoint: the row owns only its side of the bracket
            if (task.left) {
                row.v1 = task.edge.hi;
                row.uncertain = row.uncertain || task.edge.uncertain;
            } else {
                row.v2 = task.edge.lo;
                row.uncertain = row.uncertain || task.edge.uncertain;
            }
        }
        row.dv = row.v2 - row.v1;
        if (row.dv <= 0.0) continue;  // sub-tolerance window, drop
        auto mid = classify_at(p, x0, 0.5 * (row.v1 + row.v2));
        row.midpoint_ok = !mid.flagged && mid.outcome.kind == OutcomeKind::n_bounce &&
                          mid.outcome.n_bounces == row.n;
        table.rows.push_back(row);
    }
    std::sort(table.rows.begin(), table.rows.end(),
              [](const WindowRow& a, const WindowRow& b) { return a.v1 < b.v1; });
    return table;
}

std::string WindowTable::formatted() const {
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof buf, "# omega=%g x0=%g sweep=[%g,%g] step=%g tol=%g\n",
                  omega, x0, v_lo, v_hi, coarse_step, edge_tol);
    os << buf;
    os << "  n        v1        v2    dv\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%3d  %8.5f  %8.5f  %7.5f%s\n", r.n, r.v1, r.v2,
                      r.dv, r.uncertain ? "  (uncertain)" : "");
        os << buf;
    }
    return os.str();
}

double find_critical_velocity(const SimParams& p, double x0, double v_lo, double v_hi,
                              bool pair, double tol) {
    auto classify = [&](double v) {
        return pair ? run_kak(p, x0, v).outcome : run_kink(p, x0, v).outcome;
    };
    Outcome lo = classify(v_lo), hi = classify(v_hi);
    if (same_outcome(lo, hi))
        throw std::invalid_argument("find_critical_velocity: endpoints classify identically");
    while (v_hi - v_lo > tol) {
        const double mid = 0.5 * (v_lo + v_hi);
        auto m = classify(mid);
        if (same_outcome(m, lo))
            v_lo = mid;
        else
            v_hi = mid;
    }
    return 0.5 * (v_lo + v_hi);
}

double one_bounce_threshold(const std::vector<SweepPoint>& sweep, const SimParams& p,
                            double x0, double edge_tol) {
    auto is_one = [](const SweepPoint& pt) {
        return !pt.flagged && pt.outcome.kind == OutcomeKind::n_bounce &&
               pt.outcome.n_bounces == 1;
    };
    if (sweep.empty() || !is_one(sweep.back())) return -1.0;
    std::size_t first = sweep.size() - 1;
    while (first > 0 && is_one(sweep[first - 1])) --first;
    if (first == 0) return sweep.front().v;  // entire sweep is one-bounce
    auto e = bisect_edge(p, x0, sweep[first - 1].v, sweep[first - 1].outcome,
                         sweep[first].v, sweep[first].outcome, edge_tol);
    return 0.5 * (e.lo + e.hi);
}

}  // namespace phi4trap
