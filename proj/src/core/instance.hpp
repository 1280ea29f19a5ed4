#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace spinglass {

enum class CouplingKind { PlusMinusJ, Gaussian, Mixture };

/// Distribution of the random bond strengths. The mixture draws the sign of
/// the mean (+mu_tilde or -mu_tilde) fairly and adds a centered Gaussian of
/// variance 1 - mu_tilde^2, so the overall mean is 0 and the variance is 1.
/// mu_tilde = 1 degenerates to the two-point +/-1 distribution and
/// mu_tilde = 0 to the unit Gaussian.
struct CouplingDistribution {
    CouplingKind kind = CouplingKind::PlusMinusJ;
    double mu_tilde = 1.0; // used by Mixture only

    static CouplingDistribution plus_minus_j() { return {CouplingKind::PlusMinusJ, 1.0}; }
    static CouplingDistribution gaussian() { return {CouplingKind::Gaussian, 0.0}; }
    static CouplingDistribution mixture(double mu_tilde);

    double sigma_tilde_sq() const { return 1.0 - mu_tilde * mu_tilde; }
    std::string tag() const; // "pmj", "gauss" or "mix"

    bool operator==(const CouplingDistribution&) const = default;
};

/// Spins are +1/-1 entries, one per lattice node, node index = row*L + col.
using SpinConfiguration = std::vector<int8_t>;

/// 2D periodic square lattice with one coupling per nearest-neighbor bond.
/// Couplings are stored in the canonical bond order: for node i the bond to
/// its right neighbor comes first (index 2i), then the bond to its lower
/// neighbor (index 2i+1), with wraparound in both directions.
class SpinGlassInstance {
public:
    SpinGlassInstance(int side, CouplingDistribution dist, uint64_t seed,
                      std::vector<double> couplings,
                      std::optional<double> ground_energy = std::nullopt);

    int side() const { return side_; }
    int num_spins() const { return side_ * side_; }
    int num_edges() const { return 2 * num_spins(); }

    const CouplingDistribution& distribution() const { return dist_; }
    uint64_t seed() const { return seed_; }

    const std::optional<double>& ground_energy() const { return ground_energy_; }
    void set_ground_energy(double e) { ground_energy_ = e; }

    const std::vector<double>& couplings() const { return couplings_; }

    int right(int i) const { return right_[i]; }
    int down(int i) const { return down_[i]; }
    int left(int i) const { return left_[i]; }
    int up(int i) const { return up_[i]; }

    /// Endpoints of bond e in canonical order.
    void edge(int e, int& i, int& j) const;

    /// Total energy: sum over all bonds of s_i * J_ij * s_j. The ground state
    /// minimizes this sum (positive J favors anti-aligned spins).
    double energy(const SpinConfiguration& c) const;

    /// Energy change caused by flipping spin k, computed in O(1).
    double delta_energy(const SpinConfiguration& c, int k) const;

    /// Absolute tolerance for deciding that an energy reaches a target.
    /// Two-point +/-1 couplings give exact integer energies.
    double energy_tolerance() const {
        return dist_.kind == CouplingKind::PlusMinusJ ? 0.0 : 1e-9;
    }

    bool operator==(const SpinGlassInstance& other) const {
        return side_ == other.side_ && dist_ == other.dist_ && seed_ == other.seed_ &&
               couplings_ == other.couplings_ && ground_energy_ == other.ground_energy_;
    }

private:
    void check_compatible(const SpinConfiguration& c) const;

    int side_;
    CouplingDistribution dist_;
    uint64_t seed_;
    std::vector<double> couplings_;
    std::optional<double> ground_energy_;
    std::vector<int32_t> right_, down_, left_, up_;
};

/// Draws the 2L^2 couplings of a fresh instance. Equal (side, dist, seed)
/// always produce bitwise-equal couplings. Requires side >= 3: with periodic
/// boundaries side 2 would duplicate bonds between the same node pair.
SpinGlassInstance generate_instance(int side, CouplingDistribution dist, uint64_t seed);

/// Uniform random spin configuration.
SpinConfiguration random_configuration(int num_spins, Rng& rng);

/// Text form of an instance (see README for the format). Parsing the result
/// reproduces the instance exactly.
std::string write_instance(const SpinGlassInstance& inst);
SpinGlassInstance parse_instance(const std::string& text);

SpinGlassInstance read_instance_file(const std::string& path);
void write_instance_file(const SpinGlassInstance& inst, const std::string& path);

/// Inserts (or replaces) the ground_energy line of an instance file in place,
/// leaving every other line untouched.
void annotate_ground_energy_file(const std::string& path, double ground_energy);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_shortest(double v);
/// 17 significant digits, enough to round-trip any double.
std::string format_g17(double v);

} // namespace spinglass
