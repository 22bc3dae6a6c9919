#include "cvrep/network.hpp"

#include "cvrep/gaussian.hpp"
#include "cvrep/parallel.hpp"

#include <cmath>
#include <sstream>

namespace cvrep {

double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

std::array<Vec2, 4> SquareNetwork::users() const {
    return {Vec2{0.0, 0.0}, Vec2{side_km, 0.0}, Vec2{0.0, side_km}, Vec2{side_km, side_km}};
}

std::array<UserPair, 6> SquareNetwork::pairs() {
    return {UserPair{0, 1, PairClass::Adjacent}, UserPair{0, 2, PairClass::Adjacent},
            UserPair{0, 3, PairClass::Diagonal}, UserPair{1, 2, PairClass::Diagonal},
            UserPair{1, 3, PairClass::Adjacent}, UserPair{2, 3, PairClass::Adjacent}};
}

namespace {

void check_inside(const SquareNetwork& net, const Vec2& p) {
    const double slack = 1e-9 * std::max(net.side_km, 1.0);
    if (p.x < -slack || p.y < -slack || p.x > net.side_km + slack ||
        p.y > net.side_km + slack)
        throw std::invalid_argument("charlie position outside the network bounding box");
}

}  // namespace

double pair_rate(const SquareNetwork& net, const UserPair& pair, const Vec2& charlie,
                 const RateConfig& rc, const GainPolicy& policy, const LossModel& loss,
                 double chi) {
    check_inside(net, charlie);
    const auto us = net.users();
    const double d1 = distance(us[static_cast<std::size_t>(pair.u)], charlie);
    const double d2 = distance(us[static_cast<std::size_t>(pair.v)], charlie);
    return end_to_end_rate(d1, d2, Orientation::AsymmetricSourceScissor, policy, rc, loss,
                           chi)
        .rate;
}

double baseline_a(const SquareNetwork& net, const UserPair& pair, const Vec2& charlie,
                  const LossModel& loss) {
    const auto us = net.users();
    const double d1 = distance(us[static_cast<std::size_t>(pair.u)], charlie);
    const double d2 = distance(us[static_cast<std::size_t>(pair.v)], charlie);
    return repeaterless_capacity(transmissivity(d1, loss) * transmissivity(d2, loss));
}

double baseline_b(const SquareNetwork& net, const UserPair& pair, const LossModel& loss) {
    const auto us = net.users();
    const double d = distance(us[static_cast<std::size_t>(pair.u)],
                              us[static_cast<std::size_t>(pair.v)]);
    return repeaterless_capacity(transmissivity(d, loss));
}

double baseline_c(const SquareNetwork& net, const UserPair& pair, const LossModel& loss,
                  double chi) {
    const auto us = net.users();
    const double d = distance(us[static_cast<std::size_t>(pair.u)],
                              us[static_cast<std::size_t>(pair.v)]);
    return baseline_direct_dhd(chi, transmissivity(d, loss));
}

Vec2 PlacementSweepResult::grid_point(int i, int j) const {
    const double step = side_km / (grid_n - 1);
    return Vec2{i * step, j * step};
}

PlacementSweepResult placement_sweep(const SquareNetwork& net, int grid_n,
                                     const RateConfig& rc, const GainPolicy& policy,
                                     const LossModel& loss, double chi) {
    if (grid_n < 3 || grid_n % 2 == 0)
        throw std::invalid_argument("placement_sweep: grid_n must be odd and >= 3");
    PlacementSweepResult out;
    out.side_km = net.side_km;
    out.grid_n = grid_n;
    const auto pairs = SquareNetwork::pairs();
    for (auto& v : out.cells) v.resize(static_cast<std::size_t>(grid_n) * grid_n);

    // Cells run in parallel; each cell evaluates its own rates single-threaded.
    RateConfig rc_cell = rc;
    rc_cell.threads = 1;
    const std::size_t n_cells = static_cast<std::size_t>(grid_n) * grid_n;
    parallel_for(
        n_cells,
        [&](std::size_t cell) {
            const int i = static_cast<int>(cell) / grid_n;
            const int j = static_cast<int>(cell) % grid_n;
            const Vec2 c = out.grid_point(i, j);
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                CellResult r;
                r.rate = pair_rate(net, pairs[p], c, rc_cell, policy, loss, chi);
                r.cap_a = baseline_a(net, pairs[p], c, loss);
                r.cap_b = baseline_b(net, pairs[p], loss);
                r.rate_c = baseline_c(net, pairs[p], loss, chi);
                out.cells[p][cell] = r;
            }
        },
        rc.threads);
    return out;
}

double beat_fraction(const PlacementSweepResult& sweep, Baseline baseline, PairClass cls) {
    const auto pairs = SquareNetwork::pairs();
    double frac_sum = 0.0;
    int n_pairs = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (pairs[p].cls != cls) continue;
        ++n_pairs;
        std::size_t hits = 0;
        for (const CellResult& c : sweep.cells[p]) {
            const bool beat = baseline == Baseline::A   ? c.beats_a()
                              : baseline == Baseline::B ? c.beats_b()
                                                        : c.beats_c();
            if (beat) ++hits;
        }
        frac_sum += static_cast<double>(hits) / static_cast<double>(sweep.cells[p].size());
    }
    return n_pairs > 0 ? frac_sum / n_pairs : 0.0;
}

CoverageResult multi_charlie_coverage(const SquareNetwork& net,
                                      const std::vector<Vec2>& positions,
                                      const RateConfig& rc, const GainPolicy& policy,
                                      const LossModel& loss, double chi) {
    if (positions.empty())
        throw std::invalid_argument("multi_charlie_coverage: need at least one position");
    const auto pairs = SquareNetwork::pairs();
    CoverageResult res;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        double best = 0.0;
        for (const Vec2& pos : positions)
            best = std::max(best, pair_rate(net, pairs[p], pos, rc, policy, loss, chi));
        res.best_rate[p] = best;
    }
    res.all_beat_a = true;
    res.all_beat_b = true;
    res.all_beat_c = true;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        double best_a = 0.0;  // baseline (a) depends on the hub: use the friendliest hub
        for (const Vec2& pos : positions) {
            // a pair beats (a) if it beats it through the hub that maximizes its rate;
            // evaluate rate and cap together per hub.
            const double r = pair_rate(net, pairs[p], pos, rc, policy, loss, chi);
            const double ca = baseline_a(net, pairs[p], pos, loss);
            if (r > ca) best_a = std::max(best_a, 1.0);
        }
        if (best_a < 1.0) res.all_beat_a = false;
        if (!(res.best_rate[p] > baseline_b(net, pairs[p], loss))) res.all_beat_b = false;
        if (!(res.best_rate[p] > baseline_c(net, pairs[p], loss, chi))) res.all_beat_c = false;
    }
    return res;
}

std::string placement_csv(const PlacementSweepResult& sweep) {
    std::ostringstream os;
    os.precision(10);
    os << "x_km,y_km,pair_id,rate,cap_a,cap_b,rate_c,beats_a,beats_b,beats_c\n";
    const auto pairs = SquareNetwork::pairs();
    for (int i = 0; i < sweep.grid_n; ++i)
        for (int j = 0; j < sweep.grid_n; ++j) {
            const Vec2 pt = sweep.grid_point(i, j);
            const std::size_t cell = static_cast<std::size_t>(i) * sweep.grid_n + j;
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const CellResult& c = sweep.cells[p][cell];
                os << pt.x << "," << pt.y << "," << p << "," << c.rate << "," << c.cap_a
                   << "," << c.cap_b << "," << c.rate_c << "," << (c.beats_a() ? 1 : 0)
                   << "," << (c.beats_b() ? 1 : 0) << "," << (c.beats_c() ? 1 : 0) << "\n";
            }
        }
    return os.str();
}

}  // namespace cvrep
