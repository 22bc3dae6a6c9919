// Four-user square network: hub placement sweeps, repeaterless baselines and
// beat statistics.

#pragma once

#include "cvrep/rate.hpp"

#include <array>
#include <string>
#include <vector>

namespace cvrep {

struct Vec2 {
    double x = 0, y = 0;
};
double distance(const Vec2& a, const Vec2& b);

enum class PairClass { Adjacent, Diagonal };
enum class Baseline { A, B, C };

struct UserPair {
    int u = 0, v = 1;  // user indices, u < v (lexicographic: u hosts the source)
    PairClass cls = PairClass::Adjacent;
};

struct SquareNetwork {
    double side_km = 100.0;

    std::array<Vec2, 4> users() const;        // square vertices
    static std::array<UserPair, 6> pairs();   // 4 adjacent + 2 diagonal
};

/// AsymmetricSourceScissor rate for one pair with the hub at charlie:
/// d1 = |U - charlie| (source link), d2 = |V - charlie| (scissor link).
double pair_rate(const SquareNetwork& net, const UserPair& pair, const Vec2& charlie,
                 const RateConfig& rc, const GainPolicy& policy, const LossModel& loss,
                 double chi = 0.3);

/// (a) repeaterless capacity through the hub: -log2(1 - eta(d1) eta(d2)).
double baseline_a(const SquareNetwork& net, const UserPair& pair, const Vec2& charlie,
                  const LossModel& loss);
/// (b) repeaterless capacity of the direct path: -log2(1 - eta(|UV|)).
double baseline_b(const SquareNetwork& net, const UserPair& pair, const LossModel& loss);
/// (c) direct dual-homodyne rate at an end user (gaussian baseline, chi = 0.3).
double baseline_c(const SquareNetwork& net, const UserPair& pair, const LossModel& loss,
                  double chi = 0.3);

struct CellResult {
    double rate = 0, cap_a = 0, cap_b = 0, rate_c = 0;
    bool beats_a() const { return rate > cap_a; }
    bool beats_b() const { return rate > cap_b; }
    bool beats_c() const { return rate > rate_c; }
};

struct PlacementSweepResult {
    double side_km = 0;
    int grid_n = 0;
    // cells[pair][i * grid_n + j]; grid point (i, j) sits at
    // (i, j) * side/(grid_n - 1), boundary inclusive.
    std::array<std::vector<CellResult>, 6> cells;

    Vec2 grid_point(int i, int j) const;
};

PlacementSweepResult placement_sweep(const SquareNetwork& net, int grid_n,
                                     const RateConfig& rc, const GainPolicy& policy,
                                     const LossModel& loss, double chi = 0.3);

/// Fraction of grid cells whose repeater rate beats the baseline, averaged
/// over the pairs of the class.
double beat_fraction(const PlacementSweepResult& sweep, Baseline baseline, PairClass cls);

struct CoverageResult {
    std::array<double, 6> best_rate{};  // per pair, max over hubs
    bool all_beat_a = false, all_beat_b = false, all_beat_c = false;
};

/// Each pair uses its best hub among positions.
CoverageResult multi_charlie_coverage(const SquareNetwork& net,
                                      const std::vector<Vec2>& positions,
                                      const RateConfig& rc, const GainPolicy& policy,
                                      const LossModel& loss, double chi = 0.3);

std::string placement_csv(const PlacementSweepResult& sweep);

}  // namespace cvrep
