#include "zeno/exact_bath.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace zeno::bath {
namespace {

using std::complex;
const complex<double> kI{0.0, 1.0};

}  // namespace

long TruncatedBasis::key(int spin, const std::array<std::int16_t, 3>& m) const {
  const long base = n_modes + 1;
  long k = 0;
  for (int j = 2; j >= 0; --j) k = k * base + (m[j] + 1);
  return k * 2 + spin;
}

TruncatedBasis TruncatedBasis::build(int n_modes, int max_quanta) {
  if (n_modes < 1) throw std::invalid_argument("basis: need at least one mode");
  if (max_quanta < 1 || max_quanta > 3)
    throw std::invalid_argument("basis: quanta cap supported in 1..3");

  TruncatedBasis b;
  b.n_modes = n_modes;
  b.max_quanta = max_quanta;

  // Multisets of size q in ascending order, q = 0..max_quanta, for each spin.
  std::array<std::int16_t, 3> combo{-1, -1, -1};
  auto emit = [&](int spin, int q) {
    Ket k;
    k.spin = static_cast<std::int8_t>(spin);
    k.n_occ = static_cast<std::int8_t>(q);
    k.mode = combo;
    b.kets.push_back(k);
  };
  for (int spin = 0; spin < 2; ++spin) {
    for (int q = 0; q <= max_quanta; ++q) {
      combo = {-1, -1, -1};
      if (q == 0) {
        emit(spin, 0);
        continue;
      }
      // nested ascending loops; depth is at most three
      for (int m0 = 0; m0 < n_modes; ++m0) {
        combo[0] = static_cast<std::int16_t>(m0);
        if (q == 1) {
          emit(spin, 1);
          continue;
        }
        for (int m1 = m0; m1 < n_modes; ++m1) {
          combo[1] = static_cast<std::int16_t>(m1);
          if (q == 2) {
            emit(spin, 2);
            continue;
          }
          for (int m2 = m1; m2 < n_modes; ++m2) {
            combo[2] = static_cast<std::int16_t>(m2);
            emit(spin, 3);
          }
          combo[2] = -1;
        }
        combo[1] = -1;
      }
    }
  }

  b.block_slot.assign(b.kets.size(), -1);
  for (std::size_t i = 0; i < b.kets.size(); ++i) {
    b.lookup_.emplace(b.key(b.kets[i].spin, b.kets[i].mode), static_cast<long>(i));
    const int p = (b.kets[i].spin + b.kets[i].n_occ) & 1;
    b.block_slot[i] = static_cast<long>(b.parity_members[p].size());
    b.parity_members[p].push_back(static_cast<long>(i));
  }
  b.spin_partner.assign(b.kets.size(), -1);
  for (std::size_t i = 0; i < b.kets.size(); ++i) {
    auto it = b.lookup_.find(b.key(1 - b.kets[i].spin, b.kets[i].mode));
    if (it != b.lookup_.end()) b.spin_partner[i] = it->second;
  }
  return b;
}

long TruncatedBasis::index_of(int spin, std::array<int, 3> modes_sorted) const {
  if (spin < 0 || spin > 1) return -1;
  std::array<std::int16_t, 3> m;
  for (int j = 0; j < 3; ++j) {
    if (modes_sorted[j] < -1 || modes_sorted[j] >= n_modes) return -1;
    m[j] = static_cast<std::int16_t>(modes_sorted[j]);
  }
  auto it = lookup_.find(key(spin, m));
  return it == lookup_.end() ? -1 : it->second;
}

double TotalState::trace() const {
  double t = 0.0;
  for (const auto& b : branches) t += b.squaredNorm();
  return t;
}

void TotalState::prune(double weight_floor) {
  branches.erase(std::remove_if(branches.begin(), branches.end(),
                                [weight_floor](const Eigen::VectorXcd& b) {
                                  return b.squaredNorm() < weight_floor;
                                }),
                 branches.end());
}

SpectralPropagator::SpectralPropagator(std::array<Eigen::MatrixXd, 2> blocks,
                                       std::array<std::vector<long>, 2> members)
    : members_(std::move(members)) {
  blocks_[0].h = std::move(blocks[0]);
  blocks_[1].h = std::move(blocks[1]);
}

void SpectralPropagator::ensure(int parity) const {
  Block& blk = blocks_[parity];
  if (blk.ready) return;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk.h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("spectral propagator: eigendecomposition failed");
  blk.vecs = es.eigenvectors();
  blk.vals = es.eigenvalues();
  blk.ready = true;
}

const Eigen::VectorXd& SpectralPropagator::eigenvalues(int parity) const {
  ensure(parity);
  return blocks_[parity].vals;
}

void SpectralPropagator::advance(Eigen::VectorXcd& psi, double dt) const {
  if (dt == 0.0) return;
  for (int p = 0; p < 2; ++p) {
    const auto& members = members_[p];
    const long n = static_cast<long>(members.size());
    Eigen::VectorXd xr(n), xi(n);
    double norm2 = 0.0;
    for (long j = 0; j < n; ++j) {
      const complex<double> a = psi[members[j]];
      xr[j] = a.real();
      xi[j] = a.imag();
      norm2 += std::norm(a);
    }
    if (norm2 < 1e-32) continue;
    ensure(p);
    const Block& blk = blocks_[p];
    Eigen::VectorXd cr = blk.vecs.transpose() * xr;
    Eigen::VectorXd ci = blk.vecs.transpose() * xi;
    for (long j = 0; j < n; ++j) {
      const double ph = -blk.vals[j] * dt;
      const double c = std::cos(ph), s = std::sin(ph);
      const double r = cr[j], im = ci[j];
      cr[j] = r * c - im * s;
      ci[j] = r * s + im * c;
    }
    Eigen::VectorXd yr = blk.vecs * cr;
    Eigen::VectorXd yi = blk.vecs * ci;
    for (long j = 0; j < n; ++j) psi[members[j]] = complex<double>(yr[j], yi[j]);
  }
}

void SpectralPropagator::advance(TotalState& state, double dt) const {
  for (auto& b : state.branches) advance(b, dt);
}

BathSystem BathSystem::build(const DiscreteBathModel& model, int max_quanta) {
  if (model.omega.size() != model.eta.size() || model.omega.empty())
    throw std::invalid_argument("bath system: malformed mode list");

  const int n_modes = static_cast<int>(model.size());
  TruncatedBasis basis = TruncatedBasis::build(n_modes, max_quanta);
  const long dim = static_cast<long>(basis.size());

  Eigen::VectorXd h_diag(dim);
  for (long i = 0; i < dim; ++i) {
    const auto& k = basis.kets[i];
    double e = k.spin ? model.omega_a : 0.0;
    for (int j = 0; j < k.n_occ; ++j) e += model.omega[k.mode[j]];
    h_diag[i] = e;
  }

  // sigma_x (a + a†): generate each pair once from the annihilation side.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(dim) * 4);
  for (long i = 0; i < dim; ++i) {
    const auto& k = basis.kets[i];
    int j = 0;
    while (j < k.n_occ) {
      const int lam = k.mode[j];
      int count = 1;
      while (j + count < k.n_occ && k.mode[j + count] == lam) ++count;
      std::array<int, 3> rest{-1, -1, -1};
      int r = 0;
      for (int q = 0; q < k.n_occ; ++q)
        if (q != j) rest[r++] = k.mode[q];  // drop one quantum of lam, stays sorted
      const long tgt = basis.index_of(1 - k.spin, rest);
      if (tgt >= 0) {
        const double amp = model.eta[lam] * std::sqrt(static_cast<double>(count));
        trips.emplace_back(static_cast<int>(i), static_cast<int>(tgt), amp);
        trips.emplace_back(static_cast<int>(tgt), static_cast<int>(i), amp);
      }
      j += count;
    }
  }
  Eigen::SparseMatrix<double> h_coupling(static_cast<int>(dim), static_cast<int>(dim));
  h_coupling.setFromTriplets(trips.begin(), trips.end());

  std::array<Eigen::MatrixXd, 2> blocks;
  for (int p = 0; p < 2; ++p) {
    const auto& members = basis.parity_members[p];
    const long n = static_cast<long>(members.size());
    blocks[p] = Eigen::MatrixXd::Zero(n, n);
    for (long a = 0; a < n; ++a) blocks[p](a, a) = h_diag[members[a]];
  }
  for (int outer = 0; outer < h_coupling.outerSize(); ++outer)
    for (Eigen::SparseMatrix<double>::InnerIterator it(h_coupling, outer); it; ++it) {
      const int p = basis.parity_of(it.row());
      if (basis.parity_of(it.col()) != p)
        throw std::logic_error("bath system: coupling crosses parity blocks");
      blocks[p](basis.block_slot[it.row()], basis.block_slot[it.col()]) = it.value();
    }

  SpectralPropagator prop(std::move(blocks), basis.parity_members);
  return BathSystem{model, std::move(basis), std::move(h_diag), std::move(h_coupling),
                    std::move(prop)};
}

TotalState BathSystem::ground_vacuum() const {
  TotalState s;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<long>(basis.size()));
  const long idx = basis.index_of(0, {-1, -1, -1});
  psi[idx] = 1.0;
  s.branches.push_back(std::move(psi));
  return s;
}

void measure_impulsive(TotalState& state, const TruncatedBasis& basis, double prune) {
  std::vector<Eigen::VectorXcd> next;
  next.reserve(state.branches.size() * 2);
  const long dim = static_cast<long>(basis.size());
  for (const auto& b : state.branches) {
    Eigen::VectorXcd pe = Eigen::VectorXcd::Zero(dim);
    Eigen::VectorXcd pg = Eigen::VectorXcd::Zero(dim);
    for (long i = 0; i < dim; ++i) (basis.kets[i].spin ? pe : pg)[i] = b[i];
    if (pe.squaredNorm() >= prune) next.push_back(std::move(pe));
    if (pg.squaredNorm() >= prune) next.push_back(std::move(pg));
  }
  state.branches = std::move(next);
}

void measure_finite(TotalState& state, const BathSystem& sys, double tau, int substeps,
                    double prune) {
  if (!(tau > 0.0)) {
    measure_impulsive(state, sys.basis, prune);
    return;
  }
  if (substeps < 1) throw std::invalid_argument("measure_finite: substeps must be >= 1");

  // Conditional detector flip with a smooth bump h(t) = -c sech^2((t-tau/2)/tau)
  // normalized so the window integral is exactly -pi/2 (a CNOT when H_tot = 0).
  // In the detector sigma_y eigenbasis the joint generator is block diagonal,
  // H_tot ± h(t) P_e, so each branch costs two propagations, not a dimension
  // doubling.  Strang splitting alternates exact H steps with exact pulse
  // phases; the pulse integral over each substep is analytic.
  const double c = M_PI / (4.0 * tau * std::tanh(0.5));
  auto pulse_area = [&](double s1, double s2) {
    return -c * tau * (std::tanh((s2 - 0.5 * tau) / tau) - std::tanh((s1 - 0.5 * tau) / tau));
  };

  const long dim = static_cast<long>(sys.basis.size());
  const double dt = tau / substeps;
  std::vector<Eigen::VectorXcd> next;
  next.reserve(state.branches.size() * 2);
  for (const auto& b : state.branches) {
    Eigen::VectorXcd plus = b, minus = b;
    for (int j = 0; j < substeps; ++j) {
      const double theta = pulse_area(j * dt, (j + 1) * dt);
      sys.propagator.advance(plus, 0.5 * dt);
      sys.propagator.advance(minus, 0.5 * dt);
      const complex<double> fp = std::exp(-kI * theta);
      const complex<double> fm = std::exp(kI * theta);
      for (long i = 0; i < dim; ++i)
        if (sys.basis.kets[i].spin) {
          plus[i] *= fp;
          minus[i] *= fm;
        }
      sys.propagator.advance(plus, 0.5 * dt);
      sys.propagator.advance(minus, 0.5 * dt);
    }
    Eigen::VectorXcd b0 = 0.5 * (plus + minus);
    Eigen::VectorXcd b1 = 0.5 * (plus - minus);
    if (b0.squaredNorm() >= prune) next.push_back(std::move(b0));
    if (b1.squaredNorm() >= prune) next.push_back(std::move(b1));
  }
  state.branches = std::move(next);
}

Observables observe(const BathSystem& sys, const TotalState& state) {
  Observables o;
  o.purity = 0.0;
  const long dim = static_cast<long>(sys.basis.size());
  complex<double> coh{0.0, 0.0};
  for (const auto& b : state.branches) {
    for (long i = 0; i < dim; ++i) {
      const double w = std::norm(b[i]);
      if (w == 0.0) continue;
      const auto& k = sys.basis.kets[i];
      if (k.spin) {
        o.rho_ee += w;
        const long j = sys.basis.spin_partner[i];
        if (j >= 0) coh += b[i] * std::conj(b[j]);
      }
      o.h_b += w * (sys.h_diag[i] - (k.spin ? sys.model.omega_a : 0.0));
    }
    o.h_sb += (b.adjoint() * (sys.h_coupling * b)).value().real();
  }
  o.h_s = sys.model.omega_a * o.rho_ee;
  o.h_tot = o.h_s + o.h_b + o.h_sb;
  o.sys_coherence_abs = std::abs(coh);
  const std::size_t nb = state.branches.size();
  for (std::size_t a = 0; a < nb; ++a) {
    o.purity += std::pow(state.branches[a].squaredNorm(), 2);
    for (std::size_t c2 = a + 1; c2 < nb; ++c2)
      o.purity +=
          2.0 * std::norm(state.branches[a].dot(state.branches[c2]));
  }
  return o;
}

Eigen::VectorXd mode_occupations(const BathSystem& sys, const TotalState& state) {
  Eigen::VectorXd occ = Eigen::VectorXd::Zero(static_cast<long>(sys.model.size()));
  for (const auto& b : state.branches)
    for (long i = 0; i < static_cast<long>(sys.basis.size()); ++i) {
      const double w = std::norm(b[i]);
      if (w == 0.0) continue;
      const auto& k = sys.basis.kets[i];
      for (int j = 0; j < k.n_occ; ++j) occ[k.mode[j]] += w;
    }
  return occ;
}

ExactTrace simulate(const BathSystem& sys, const me::MeasurementSchedule& schedule,
                    double horizon, ExactRunOptions opt) {
  if (horizon <= 0.0) throw std::invalid_argument("simulate: horizon must be positive");
  schedule.validate(horizon);
  for (const auto& ev : schedule.events)
    if (ev.time + ev.duration > horizon)
      throw std::invalid_argument("simulate: detector window extends past the horizon");

  const int n = std::max(1, opt.n_samples);
  std::vector<double> stops;
  stops.reserve(static_cast<std::size_t>(n) + schedule.events.size() + 1);
  for (int i = 0; i <= n; ++i) stops.push_back(horizon * i / n);
  for (const auto& ev : schedule.events) stops.push_back(ev.time);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end(),
                          [&](double a, double b) { return b - a < 1e-13 * horizon; }),
              stops.end());
  // drop samples inside detector windows; the window edges are recorded anyway
  stops.erase(std::remove_if(stops.begin(), stops.end(),
                             [&](double s) {
                               for (const auto& ev : schedule.events)
                                 if (ev.duration > 0.0 && s > ev.time &&
                                     s <= ev.time + ev.duration + 1e-13 * horizon)
                                   return true;
                               return false;
                             }),
              stops.end());

  TotalState state = sys.ground_vacuum();
  if (opt.pre_relax > 0.0) sys.propagator.advance(state, opt.pre_relax);

  ExactTrace trace;
  trace.times.reserve(stops.size() + schedule.events.size());
  std::vector<Eigen::VectorXd> mode_rows;

  auto record = [&](double t) {
    trace.times.push_back(t);
    trace.obs.push_back(observe(sys, state));
    if (opt.with_modes) mode_rows.push_back(mode_occupations(sys, state));
  };

  double t_cur = 0.0;
  std::size_t ev_idx = 0;
  for (double s : stops) {
    if (s < t_cur - 1e-13 * horizon) continue;  // swallowed by a detector window
    sys.propagator.advance(state, s - t_cur);
    t_cur = s;
    bool is_event = ev_idx < schedule.events.size() &&
                    std::abs(schedule.events[ev_idx].time - s) < 1e-12 * std::max(1.0, horizon);
    if (!is_event) {
      record(s);
      continue;
    }
    const auto& ev = schedule.events[ev_idx++];
    trace.event_times.push_back(ev.time);
    if (ev.duration <= 0.0) {
      measure_impulsive(state, sys.basis, opt.prune);
      record(s);  // post-measurement, populations are untouched anyway
    } else {
      record(s);  // last look before the detector window
      measure_finite(state, sys, ev.duration, opt.detector_substeps, opt.prune);
      t_cur = ev.time + ev.duration;
      record(t_cur);
    }
  }

  if (opt.with_modes && !mode_rows.empty()) {
    trace.modes.resize(static_cast<long>(mode_rows.size()),
                       static_cast<long>(sys.model.size()));
    for (std::size_t r = 0; r < mode_rows.size(); ++r)
      trace.modes.row(static_cast<long>(r)) = mode_rows[r];
  }
  return trace;
}

std::vector<double> rho_ee_series(const ExactTrace& trace) {
  std::vector<double> out;
  out.reserve(trace.obs.size());
  for (const auto& o : trace.obs) out.push_back(o.rho_ee);
  return out;
}

}  // namespace zeno::bath
