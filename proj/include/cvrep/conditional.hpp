// Conditional two-mode states after the dual-homodyne swap, for the three
// device orientations. Each closed form is paired with a brute-force tensor
// oracle that builds the half-channel kets explicitly, projects onto the
// measurement eigenstate with displacement_matrix, and traces the
// environments. The closed forms and the oracle must agree elementwise; the
// test suites enforce this.

#pragma once

#include "cvrep/channel.hpp"
#include "cvrep/fock.hpp"

#include <complex>
#include <string>

namespace cvrep {

struct TruncationInsufficient : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Which ends hold the TMSV sources and the scissors.
///  - AsymmetricSourceScissor: TMSV at Alice, QS at Bob, one of each at
///    Charlie (the reference layout).
///  - SymmetricSources: TMSV at both ends, both scissors + DHD at Charlie.
///  - SymmetricScissors: both sources + DHD at Charlie, scissors at the ends.
enum class Orientation { AsymmetricSourceScissor, SymmetricSources, SymmetricScissors };

std::string to_string(Orientation o);
Orientation orientation_from_string(const std::string& s);

struct LinkPairConfig {
    HalfChannelParams link1;
    HalfChannelParams link2;
    Orientation orientation = Orientation::AsymmetricSourceScissor;
    int n_max = 0;               // Fock cutoff of the untruncated mode(s); 0 = resolve via truncation_level
    double trace_target = 0.99;  // fraction of the extrapolated trace the cutoff must keep

    void validate() const;
};

/// Unnormalized conditional density matrix with its trace recorded as the
/// statistical weight (the unnormalized probability density of the swap
/// outcome gamma).
struct TwoModeFockState {
    ComplexMatrix matrix;
    ModeDims dims;
    bool normalized = false;
    double weight = 0.0;

    TwoModeFockState normalize() const;
    /// Max Hermiticity defect relative to weight; tests pin this below 1e-9.
    double hermiticity_defect() const;
};

/// Closed form for the asymmetric orientation. Mode A: 0..n_max, mode B: {0,1}
/// (the scissor output support is exactly two-dimensional).
TwoModeFockState build_asymmetric(const LinkPairConfig& cfg, Complex gamma);

/// Closed form for TMSV-at-both-ends; dims (n_max+1) x (n_max+1).
TwoModeFockState build_symmetric_sources(const LinkPairConfig& cfg, Complex gamma);

/// The scissors-at-ends 4x4 matrix with chi' = chi1*chi2. No gamma
/// dependence: the swap happens at the sources and the outcome displacement
/// is corrected by feed-forward before transmission.
TwoModeFockState build_symmetric_scissors(const LinkPairConfig& cfg);

/// Dispatch on cfg.orientation (gamma ignored for SymmetricScissors).
TwoModeFockState build_conditional(const LinkPairConfig& cfg, Complex gamma);

/// Brute-force validation path: explicit half-channel kets in the full
/// (stored x scissor x environment) tensor space, projected and traced.
/// O(n_max^2 * m_cut^2) work and memory; intended for n_max <= ~10.
TwoModeFockState oracle_state(const LinkPairConfig& cfg, Complex gamma);

/// Smallest n_max whose gamma=0 trace reaches trace_target of the
/// geometrically extrapolated limit. Throws NoConvergence if the trace
/// increments are not geometrically decaying after 64 steps.
int truncation_level(const LinkPairConfig& cfg);
int truncation_level(const LinkPairConfig& cfg, double trace_target);

/// cfg with n_max resolved (cfg.n_max if positive, else truncation_level).
LinkPairConfig resolved(const LinkPairConfig& cfg);
LinkPairConfig resolved(const LinkPairConfig& cfg, double trace_target);

/// Debug representation: {"dims": [da, db], "entries": [[re, im], ...]
/// row-major, "weight": w}. Kept as a plain string assembler so the core
/// library does not depend on a JSON library.
std::string state_to_json(const TwoModeFockState& s);

}  // namespace cvrep
