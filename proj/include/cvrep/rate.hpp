// Rate engine: reverse coherent information, the conditional rate R(gamma),
// the gamma window, the ergodic (gamma-averaged) rate, distance sweeps and
// multiplexing optimization.

#pragma once

#include "cvrep/channel.hpp"
#include "cvrep/conditional.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace cvrep {

struct MassNotReached : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QuadratureNotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RateConfig {
    long multiplexing = 1000;   // M
    double swap_success = 1.0;  // q; DHD is deterministic
    double gamma_mass = 0.99;   // fraction of the total gamma-mass the window must capture
    int radial_nodes = 64;      // Gauss-Legendre nodes, doubled until converged
    double quad_rel_tol = 3e-3;
    int max_node_doublings = 3;
    int threads = 0;  // 0 = hardware concurrency

    // The working Fock cutoff is resolved at a stricter trace target than
    // gamma_mass, 1 - (1 - gamma_mass)/trunc_margin, so the gamma window can
    // actually reach its mass target on the truncated state.
    double trunc_margin = 10.0;

    double internal_trace_target() const { return 1.0 - (1.0 - gamma_mass) / trunc_margin; }
};

struct RatePoint {
    double d1_km = 0, d2_km = 0;
    double eta1 = 1, eta2 = 1;
    double g1 = 1, g2 = 1;
    Orientation orientation = Orientation::AsymmetricSourceScissor;
    long multiplexing = 1;
    double rate = 0;              // ebits/mode
    double cap_direct = 0;        // -log2(1 - eta(d1 + d2))
    double cap_through_node = 0;  // -log2(1 - eta1 * eta2)
};

/// H(rho_A) - H(rho_AB) in bits; the state must be normalized.
double rci(const TwoModeFockState& state);

/// max(RCI, 0) * q * (1-(1-p1)^M)(1-(1-p2)^M) / M.
double conditional_rate(const TwoModeFockState& state, double p1, double p2,
                        const RateConfig& rc);

/// Smallest radius whose enclosed gamma-mass reaches gamma_mass of the
/// analytic total P_NLA,1 * P_NLA,2. cfg must have n_max resolved.
double gamma_max(const LinkPairConfig& cfg, const RateConfig& rc);

/// Joint success probability of both end scissors in the scissors-at-ends
/// layout (the heralds are bound to the same channel pair, so the rate uses
/// a single multiplexing boost on this probability).
double scissors_joint_success(const LinkPairConfig& cfg);

struct ErgodicResult {
    double rate = 0;       // ebits/mode at rc.multiplexing
    double rci_avg = 0;    // gamma-averaged positive-part RCI (M-independent)
    double p1 = 0, p2 = 0;
    double gamma_max = 0;  // 0 for SymmetricScissors
    int n_max = 0;
    int nodes_used = 0;
};

ErgodicResult ergodic_rate_detailed(const LinkPairConfig& cfg, const RateConfig& rc);
double ergodic_rate(const LinkPairConfig& cfg, const RateConfig& rc);

LinkPairConfig make_link_pair(double d1_km, double d2_km, Orientation orientation,
                              const GainPolicy& policy, const LossModel& loss,
                              double chi = 0.3);

RatePoint end_to_end_rate(double d1_km, double d2_km, Orientation orientation,
                          const GainPolicy& policy, const RateConfig& rc,
                          const LossModel& loss, double chi = 0.3);

/// Symmetric splits d1 = d2 = total/2 for each orientation and total distance.
std::vector<RatePoint> rate_distance_sweep(const std::vector<double>& total_km,
                                           const std::vector<Orientation>& orientations,
                                           const RateConfig& rc, const LossModel& loss,
                                           const GainPolicy& policy, double chi = 0.3);

/// argmax over M of (1-(1-p1)^M)(1-(1-p2)^M)/M (powers of two, then an
/// integer ternary refine). The gamma average is M-independent, so this is
/// exact for the full rate as well.
std::pair<long, double> optimal_multiplexing(double p1, double p2);

/// Best multiplexing and the corresponding rate for a symmetric split of
/// total_km under the given gains.
struct OptimizedM {
    long m_star = 1;
    double rate = 0;
};
OptimizedM optimized_m_rate(const LinkPairConfig& cfg, const RateConfig& rc);

/// The rate engine's canonical NumericOpt objective: ergodic rate of a
/// symmetric pair (eta1 = eta2 = eta, g1 = g2 = g) of the given orientation.
/// optimize_m switches the objective to the M-optimized rate.
GainPolicy make_numeric_opt_policy(Orientation orientation, const RateConfig& rc,
                                   double chi = 0.3, double g_max = 400.0,
                                   bool optimize_m = false);

std::string rate_csv_header();
std::string rate_csv_row(const RatePoint& p);

}  // namespace cvrep
