#pragma once
// exact_bath.hpp — numerically exact dynamics of the qubit plus a discretized
// bath in a truncated Fock space.
//
// The interaction sigma_x (a + a†) changes spin and quanta together, so total
// excitation parity (spin + quanta mod 2) is conserved and the Hamiltonian
// splits into two blocks of half the dimension.  Each block is diagonalized
// once; propagation between events is then exact to roundoff at any stride.
// States are kept as ensembles of unnormalized pure branches: initial states
// are products, and non-selective measurements split branches instead of
// densifying, so rho = sum_b |psi_b><psi_b| stays cheap next to a dense
// density-matrix integrator.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "zeno/master_equation.hpp"
#include "zeno/spectrum.hpp"

namespace zeno::bath {

// Fock states with at most max_quanta total excitations across all modes.
struct TruncatedBasis {
  struct Ket {
    std::int8_t spin = 0;                        // 0 = ground, 1 = excited
    std::int8_t n_occ = 0;                       // number of quanta
    std::array<std::int16_t, 3> mode{-1, -1, -1};  // sorted ascending, -1 pad
  };

  int n_modes = 0;
  int max_quanta = 2;
  std::vector<Ket> kets;
  std::array<std::vector<long>, 2> parity_members;  // global indices per block
  std::vector<long> block_slot;    // global index -> position inside its block
  std::vector<long> spin_partner;  // same bath content, flipped spin (-1 if absent)

  static TruncatedBasis build(int n_modes, int max_quanta = 2);
  long index_of(int spin, std::array<int, 3> modes_sorted) const;
  int parity_of(long idx) const { return (kets[idx].spin + kets[idx].n_occ) & 1; }
  std::size_t size() const { return kets.size(); }

 private:
  std::unordered_map<long, long> lookup_;
  long key(int spin, const std::array<std::int16_t, 3>& m) const;
};

// rho = sum_b |psi_b><psi_b| with sum_b |psi_b|^2 = 1.
struct TotalState {
  std::vector<Eigen::VectorXcd> branches;
  double trace() const;
  void prune(double weight_floor = 1e-12);
};

class SpectralPropagator {
 public:
  // Takes ownership of the dense parity blocks; diagonalizes lazily.  The
  // member lists map block slots back to global basis indices.
  SpectralPropagator(std::array<Eigen::MatrixXd, 2> blocks,
                     std::array<std::vector<long>, 2> members);

  void advance(Eigen::VectorXcd& psi, double dt) const;
  void advance(TotalState& state, double dt) const;
  const Eigen::VectorXd& eigenvalues(int parity) const;

 private:
  struct Block {
    Eigen::MatrixXd h;
    Eigen::MatrixXd vecs;
    Eigen::VectorXd vals;
    bool ready = false;
  };
  void ensure(int parity) const;

  std::array<std::vector<long>, 2> members_;
  mutable std::array<Block, 2> blocks_;
};

struct BathSystem {
  DiscreteBathModel model;
  TruncatedBasis basis;
  Eigen::VectorXd h_diag;                 // qubit + bath energies
  Eigen::SparseMatrix<double> h_coupling;  // sigma_x (a + a†) part
  SpectralPropagator propagator;

  static BathSystem build(const DiscreteBathModel& model, int max_quanta = 2);
  TotalState ground_vacuum() const;
  std::size_t dimension() const { return basis.size(); }
};

// Non-selective projective readout of sigma_z: keeps the spin-diagonal blocks.
void measure_impulsive(TotalState& state, const TruncatedBasis& basis,
                       double prune = 1e-12);

// Readout of duration tau through an ancilla detector flipped by a smooth
// pulse conditioned on the excited state.  The detector enters in a fixed
// pure state and is traced out at the end of the window, which splits each
// branch in two.  tau -> 0 recovers the impulsive map.
void measure_finite(TotalState& state, const BathSystem& sys, double tau,
                    int substeps = 256, double prune = 1e-12);

struct Observables {
  double rho_ee = 0.0;
  double h_s = 0.0;
  double h_b = 0.0;
  double h_sb = 0.0;
  double h_tot = 0.0;
  double purity = 1.0;
  double sys_coherence_abs = 0.0;  // |Tr_B <e|rho|g>|
};

Observables observe(const BathSystem& sys, const TotalState& state);
Eigen::VectorXd mode_occupations(const BathSystem& sys, const TotalState& state);

struct ExactRunOptions {
  double pre_relax = 0.0;     // free evolution before t = 0
  int n_samples = 200;
  int detector_substeps = 256;
  bool with_modes = false;
  double prune = 1e-12;
};

struct ExactTrace {
  std::vector<double> times;
  std::vector<Observables> obs;
  std::vector<double> event_times;
  Eigen::MatrixXd modes;  // times x n_modes, filled when requested
};

// Runs the full pipeline: optional pre-relaxation from |g, vacuum>, then the
// measurement schedule over [0, horizon].  Samples strictly inside a finite
// detector window are skipped; impulsive event samples are post-measurement.
ExactTrace simulate(const BathSystem& sys, const me::MeasurementSchedule& schedule,
                    double horizon, ExactRunOptions opt = {});

std::vector<double> rho_ee_series(const ExactTrace& trace);

}  // namespace zeno::bath
