#include "pursuit/evader.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pursuit {

namespace {

double unit_double(std::mt19937_64& rng) {
  // 53-bit mantissa in [0, 1); avoids implementation-defined distributions.
  return (rng() >> 11) * (1.0 / 9007199254740992.0);
}

VectorXd random_unit(std::mt19937_64& rng, Index dim) {
  VectorXd v(dim);
  do {
    for (Index i = 0; i < dim; ++i) v(i) = 2.0 * unit_double(rng) - 1.0;
  } while (v.norm() < 1e-3);
  return v.normalized();
}

VectorXd perpendicular_to(const VectorXd& z0) {
  const Index dim = z0.size();
  if (dim == 1 || z0.norm() == 0.0) return VectorXd::Zero(dim);
  // Axis least aligned with z0, Gram-Schmidt against z0.
  Index axis = 0;
  z0.cwiseAbs().minCoeff(&axis);
  VectorXd e = VectorXd::Zero(dim);
  e(axis) = 1.0;
  const VectorXd zn = z0.normalized();
  VectorXd p = e - zn.dot(e) * zn;
  return p.normalized();
}

}  // namespace

VectorXd EvaderSignal::at_step(Index k) const {
  if (analytic_)
    return dir_ * (amp_ * std::exp(-decay_ * (static_cast<double>(k) * dt_)));
  const auto it = std::upper_bound(end_steps_.begin(), end_steps_.end(), k);
  if (it == end_steps_.end()) return VectorXd::Zero(dim_);
  return values_[static_cast<std::size_t>(it - end_steps_.begin())];
}

EvaderSignal make_evader(const EvaderSpec& spec, double sigma, double horizon,
                         Index dim, const VectorXd& z0, double dt) {
  if (!(dt > 0.0)) throw BadSpec("evader realization requires dt > 0");
  if (!(horizon > 0.0)) throw BadSpec("evader realization requires horizon > 0");
  if (!(spec.budget_fraction >= 0.0 && spec.budget_fraction <= 1.0))
    throw BadSpec("budget_fraction must lie in [0, 1]");

  EvaderSignal sig(dim, dt);
  const double budget = spec.budget_fraction * sigma * sigma;

  const auto analytic_decay = [&](const VectorXd& dir) {
    if (!(spec.decay > 0.0)) throw BadSpec("decay rate must be positive");
    sig.analytic_ = true;
    sig.decay_ = spec.decay;
    sig.dir_ = dir;
    if (dir.norm() == 0.0 || budget == 0.0) {
      sig.amp_ = 0.0;
      sig.energy_ = 0.0;
      return;
    }
    // Zero-order-hold energy sum_{k>=0} amp^2 e^{-2 decay k dt} dt is a
    // geometric series; normalize it to the budget exactly.
    const double series = dt / -std::expm1(-2.0 * spec.decay * dt);
    sig.amp_ = std::sqrt(budget / series);
    sig.energy_ = budget;
  };

  switch (spec.kind) {
    case EvaderKind::zero:
      sig.analytic_ = true;
      sig.dir_ = VectorXd::Zero(dim);
      return sig;
    case EvaderKind::constant_decay: {
      VectorXd dir = spec.direction;
      if (dir.size() == 0) {
        std::mt19937_64 rng(spec.seed ^ 0xD1CEull);
        dir = random_unit(rng, dim);
      }
      if (dir.size() != dim) throw BadSpec("direction dimension mismatch");
      if (dir.norm() > 0.0) dir.normalize();
      analytic_decay(dir);
      return sig;
    }
    case EvaderKind::radial_flee: {
      // Flee along y - x: the evader runs directly away from the pursuer.
      const VectorXd dir =
          z0.norm() > 0.0 ? VectorXd(-z0.normalized()) : VectorXd::Zero(dim);
      analytic_decay(dir);
      return sig;
    }
    case EvaderKind::perpendicular: {
      analytic_decay(perpendicular_to(z0));
      return sig;
    }
    case EvaderKind::piecewise: {
      std::mt19937_64 rng(spec.seed * 2654435761u + 17u);
      std::vector<double> brk = spec.breakpoints;
      if (brk.empty()) {
        const int nseg = 3;
        double t = 0.0;
        for (int i = 0; i < nseg; ++i) {
          t += (0.1 + 0.5 * unit_double(rng)) * horizon * 0.8 / nseg;
          brk.push_back(t);
        }
      }
      std::sort(brk.begin(), brk.end());
      Index prev_end = 0;
      std::vector<Index> ends;
      std::vector<VectorXd> raw;
      std::vector<double> lens;
      for (double bp : brk) {
        if (!(bp > 0.0)) throw BadSpec("breakpoints must be positive");
        // Snap to the grid so the zero-order-hold energy sum is exact.
        const Index end = static_cast<Index>(std::llround(bp / dt));
        if (end <= prev_end) continue;
        const double weight = 0.25 + 0.75 * unit_double(rng);
        ends.push_back(end);
        raw.push_back(weight * random_unit(rng, dim));
        lens.push_back(static_cast<double>(end - prev_end) * dt);
        prev_end = end;
      }
      double raw_energy = 0.0;
      for (std::size_t i = 0; i < raw.size(); ++i)
        raw_energy += raw[i].squaredNorm() * lens[i];
      const double scale =
          raw_energy > 0.0 ? std::sqrt(budget / raw_energy) : 0.0;
      for (auto& value : raw) value *= scale;
      sig.end_steps_ = std::move(ends);
      sig.values_ = std::move(raw);
      sig.energy_ = raw_energy > 0.0 ? budget : 0.0;
      return sig;
    }
    case EvaderKind::seeded_random: {
      std::mt19937_64 rng(spec.seed * 0x9e3779b97f4a7c15ull + 1u);
      const Index block = std::max<Index>(
          1, static_cast<Index>(std::llround(horizon / (64.0 * dt))));
      const Index support =
          static_cast<Index>(std::llround(0.9 * horizon / dt));
      std::vector<Index> ends;
      std::vector<VectorXd> raw;
      double raw_energy = 0.0;
      Index start = 0;
      while (start < support) {
        const Index end = std::min<Index>(start + block, support);
        const double t = static_cast<double>(start) * dt;
        const double envelope = std::exp(-t / (0.35 * horizon));
        const double weight = (0.2 + 0.8 * unit_double(rng)) * envelope;
        const VectorXd value = weight * random_unit(rng, dim);
        raw_energy += value.squaredNorm() * static_cast<double>(end - start) * dt;
        ends.push_back(end);
        raw.push_back(value);
        start = end;
      }
      const double scale =
          raw_energy > 0.0 ? std::sqrt(budget / raw_energy) : 0.0;
      for (auto& value : raw) value *= scale;
      sig.end_steps_ = std::move(ends);
      sig.values_ = std::move(raw);
      sig.energy_ = raw_energy > 0.0 ? budget : 0.0;
      return sig;
    }
  }
  throw BadSpec("unknown evader kind");
}

std::vector<EvaderSpec> evader_suite(int seeds_per_kind) {
  const EvaderKind kinds[] = {
      EvaderKind::zero,          EvaderKind::constant_decay,
      EvaderKind::radial_flee,   EvaderKind::perpendicular,
      EvaderKind::piecewise,     EvaderKind::seeded_random,
  };
  std::vector<EvaderSpec> suite;
  int kind_idx = 0;
  for (EvaderKind kind : kinds) {
    for (int s = 0; s < seeds_per_kind; ++s) {
      EvaderSpec spec;
      spec.kind = kind;
      spec.seed = static_cast<std::uint64_t>(1000 * kind_idx + s);
      spec.decay = 0.5 + 0.35 * s;
      spec.budget_fraction = 1.0 - 0.12 * s;
      suite.push_back(spec);
    }
    ++kind_idx;
  }
  return suite;
}

}  // namespace pursuit
