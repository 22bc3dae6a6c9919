// Scalar channel elements: TMSV Schmidt coefficients, fiber transmissivity,
// repeaterless capacity, quantum-scissor success probability, gain policies,
// and the multiplexing boost.

#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace cvrep {

/// One half channel: TMSV source with squeezing chi = tanh(zeta), pure-loss
/// segment of transmissivity eta, quantum scissor of gain g.
struct HalfChannelParams {
    double chi = 0.3;   // in [0, 1)
    double eta = 1.0;   // in (0, 1]
    double g = 1.0;     // >= 0

    double alpha() const;  // sqrt(1 - eta)
    void validate() const;
};

struct LossModel {
    double db_per_km = 0.2;
};

/// eta = 10^(-db_per_km * d / 10)
double transmissivity(double distance_km, const LossModel& loss = {});

/// PLOB bound -log2(1 - eta) in ebits/mode. eta == 1 returns the sentinel.
double repeaterless_capacity(double eta, double eta1_sentinel = 1e6);

/// c_n = sqrt(1 - chi^2) chi^n for n = 0..n_max.
std::vector<double> tmsv_schmidt_coeffs(double chi, int n_max);

/// Success probability of the scissor-based NLA on the lossy arm of a TMSV;
/// equals the squared norm of the heralded half-channel state.
double qs_success_probability(const HalfChannelParams& p);

/// 1 - (1 - p)^M, computed stably for small p and large M.
double multiplex_boost(double p, long multiplexing);

/// Gain selection policy. Fixed and PowerLaw are closed-form; NumericOpt does
/// a grid-search argmax of an injected objective(eta, g) (typically the
/// ergodic rate of a symmetric link pair, supplied by the rate engine).
/// NumericOpt results are memoized on eta quantized to cache_quantum_db of
/// path loss, so sweeps over near-identical distances stay cheap and
/// deterministic.
struct GainPolicy {
    enum class Kind { Fixed, PowerLaw, NumericOpt };

    Kind kind = Kind::Fixed;
    double fixed_g = 1.0;

    // PowerLaw: g = a * eta^(-b), capped at g_max.
    double a = 1.0;
    double b = 0.25;
    double g_max = std::numeric_limits<double>::infinity();

    // NumericOpt:
    std::vector<double> g_grid;
    std::function<double(double eta, double g)> objective;
    double cache_quantum_db = 0.01;

    static GainPolicy fixed(double g);
    static GainPolicy power_law(double a = 1.0, double b = 0.25,
                                double g_max = std::numeric_limits<double>::infinity());
    static GainPolicy numeric_opt(std::function<double(double, double)> objective,
                                  double g_max = 400.0);

    /// Geometric grid 1..g_max (ratio ~1.25) with the cap value included.
    static std::vector<double> default_grid(double g_max);

  private:
    struct Cache {
        std::mutex mu;
        std::unordered_map<long long, double> map;
    };
    std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
    friend double gain_policy(double, const GainPolicy&);
};

/// Evaluate the policy at one transmissivity.
double gain_policy(double eta, const GainPolicy& policy);

}  // namespace cvrep
