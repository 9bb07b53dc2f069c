#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

// Exact linear-optics engine on a truncated multimode Fock space.
//
// States live on `num_modes` bosonic modes, each truncated at `cutoff`
// photons (inclusive), so the amplitude array has (cutoff+1)^num_modes
// entries. Truncation is structural: components above the cutoff do not
// exist. Operations guard against amplitude leaking past the cutoff and
// raise instead of silently corrupting the norm.
//
// All operations are pure functions over immutable values; there is no
// global state, so values can be shared freely between threads.

namespace homsim::fock {

using cplx = std::complex<double>;

// An operation would push non-negligible amplitude past the photon cutoff.
struct truncation_overflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A displacement needs a larger cutoff to stay within the norm-defect budget.
struct cutoff_too_small : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class StateVector {
public:
    StateVector(int num_modes, int cutoff);

    int num_modes() const { return num_modes_; }
    int cutoff() const { return cutoff_; }
    int levels() const { return cutoff_ + 1; }
    std::size_t dim() const { return amps_.size(); }

    // Mode k advances the flat index in steps of (cutoff+1)^k.
    std::size_t stride(int mode) const;

    cplx& operator[](std::size_t i) { return amps_[i]; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }

    // Photon number of `mode` in the basis state with flat index `index`.
    int occupation(std::size_t index, int mode) const;
    std::size_t index_of(const std::vector<int>& occupations) const;
    cplx amplitude(const std::vector<int>& occupations) const;

    double norm_sq() const;
    void normalize();  // throws std::domain_error on a zero state

    double mean_photon_number(int mode) const;
    double total_mean_photon_number() const;

private:
    int num_modes_;
    int cutoff_;
    std::vector<std::size_t> strides_;
    std::vector<cplx> amps_;
};

struct Branch {
    double probability;
    StateVector state;
};

// Classical probability mixture of pure states, used to represent loss.
struct Ensemble {
    std::vector<Branch> branches;

    static Ensemble pure(StateVector s);
    double total_probability() const;
};

// Threshold (click / no-click) detector. Detector efficiency is not modeled
// here: it is folded into the channel transmittance upstream, which leaves
// unit-efficiency detection plus a dark-count probability per window.
struct DetectorModel {
    double dark_prob = 0.0;

    explicit DetectorModel(double d);
};

StateVector make_vacuum(int num_modes, int cutoff);

// Normalized image of a^dag acting on `mode`. The l2 norm of the slice at
// n_mode == cutoff must be below 1e-12, otherwise the shifted component
// would fall off the truncated space. If `image_norm` is non-null it
// receives the norm of the unnormalized image (e.g. sqrt(2) when adding a
// photon on top of |1>).
StateVector apply_create(const StateVector& s, int mode, double* image_norm = nullptr);

// Displacement D(alpha) = exp(alpha a^dag - conj(alpha) a) on `mode`.
// A mode that factors as vacuum receives the projected coherent expansion
// e^{-|a|^2/2} a^n/sqrt(n!); general inputs go through the exponential of
// the truncated generator, which is exactly unitary on the truncated
// space. The two routes agree within 1e-8 under the tail guard: the
// coherent-state defect exp(-|a|^2) sum_{n>cutoff} |a|^{2n}/n! must be
// < 1e-10.
StateVector apply_displacement(const StateVector& s, int mode, cplx alpha);

// Two-mode rotation:  a^dag_1 -> c a^dag_1 + sn a^dag_2,
//                     a^dag_2 -> -sn a^dag_1 + c a^dag_2,   c^2 + sn^2 = 1.
// Photon number is conserved pairwise; basis states whose pair total would
// exceed the cutoff must carry squared weight < 1e-8 (they are dropped).
StateVector apply_mixer(const StateVector& s, int m1, int m2, double c, double sn);

// Half beamsplitter with the convention a -> (x - y)/sqrt(2),
// b -> (x + y)/sqrt(2); outputs x, y reuse the slots of mode_a, mode_b.
StateVector apply_beamsplitter_50_50(const StateVector& s, int mode_a, int mode_b);

// Pure-loss channel of transmittance T on one mode, implemented with the
// exact Kraus decomposition K_k |n> = sqrt(C(n,k) T^{n-k} (1-T)^k) |n-k>.
// Branches that coincide up to a global phase are merged, so e.g. a
// coherent state stays a single branch and a single photon splits into
// the familiar {T, 1-T} pair.
Ensemble apply_loss(const Ensemble& e, int mode, double transmittance);
Ensemble apply_loss(const StateVector& s, int mode, double transmittance);

// Probability that every mode in `modes` holds zero photons.
double vacuum_probability(const StateVector& s, const std::vector<int>& modes);

// Probability that the threshold detectors watching the two disjoint mode
// groups both click. Detector i stays silent with probability
// (1-d) P(vacuum in group i); inclusion-exclusion over the two detectors
// gives 1 - q_x - q_y + q_xy with q_xy = (1-d)^2 P(vacuum in both groups).
// Averaged over ensemble branches.
double coincidence_click_probability(const Ensemble& e,
                                     const std::vector<int>& group_x,
                                     const std::vector<int>& group_y,
                                     const DetectorModel& det);
double coincidence_click_probability(const StateVector& s,
                                     const std::vector<int>& group_x,
                                     const std::vector<int>& group_y,
                                     const DetectorModel& det);

// Norm defect of a coherent state |alpha|^2 = alpha_sq truncated at cutoff.
double coherent_tail_defect(double alpha_sq, int cutoff);

// Dense density operator of an ensemble (dim x dim, row-major). Intended
// for small systems in validation checks and tests.
std::vector<cplx> density_matrix(const Ensemble& e);
double frobenius_distance(const std::vector<cplx>& a, const std::vector<cplx>& b);

}  // namespace homsim::fock
