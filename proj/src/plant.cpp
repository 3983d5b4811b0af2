#include "reconfig/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace reconfig {

namespace {

void check_matrix(const Matrix& m, std::size_t rows, std::size_t cols, const char* what) {
  if (m.size() != rows) throw ReconfigError(std::string("plant: ") + what + " row count");
  for (const auto& r : m)
    if (r.size() != cols) throw ReconfigError(std::string("plant: ") + what + " column count");
}

}  // namespace

void PlantDynamics::check() const {
  if (outputs == 0 || actuations == 0) throw ReconfigError("plant: empty dimensions");
  if (bias.size() != outputs) throw ReconfigError("plant: bias size");
  for (const auto& m : ar) check_matrix(m, outputs, outputs, "ar");
  for (const auto& m : input) check_matrix(m, outputs, actuations, "input");
  if (coupling_dim > 0) check_matrix(coupling, outputs, coupling_dim, "coupling");
  if (!quadratic.empty()) check_matrix(quadratic, outputs, actuations, "quadratic");
}

void PlantSpec::check() const {
  dynamics.check();
  if (noise_std < 0.0) throw ReconfigError("plant: noise std must be >= 0");
  if (disturbance.onset < 1) throw ReconfigError("plant: disturbance onset must be >= 1");
  if (disturbance.kind == DisturbanceKind::periodic && !(disturbance.period > 0.0))
    throw ReconfigError("plant: periodic disturbance needs a positive period");
  for (auto c : disturbance.channels)
    if (c >= dynamics.actuations) throw ReconfigError("plant: disturbance channel out of range");
}

double disturbance_at(const DisturbanceProfile& p, long k) {
  if (p.kind == DisturbanceKind::none || k < p.onset) return 0.0;
  switch (p.kind) {
    case DisturbanceKind::step: return p.magnitude;
    case DisturbanceKind::drift: return p.magnitude * static_cast<double>(k - p.onset + 1);
    case DisturbanceKind::periodic:
      return p.magnitude *
             std::sin(2.0 * std::numbers::pi * static_cast<double>(k - p.onset) / p.period);
    case DisturbanceKind::none: break;
  }
  return 0.0;
}

PlantState::PlantState(const PlantSpec& spec) : noise_rng_(spec.seed) {
  const auto& d = spec.dynamics;
  outputs_.assign(d.ar.size(), std::vector<double>(d.outputs, 0.0));
  const std::size_t lags = d.input.empty() ? 0 : d.input.size() - 1;
  actuations_.assign(lags, std::vector<double>(d.actuations, 0.0));
}

struct PlantStepper {
  static PlantStep step(const PlantSpec& spec, PlantState& st, const std::vector<double>& u,
                        const std::vector<double>& w, long k) {
    const auto& d = spec.dynamics;
    if (u.size() != d.actuations) throw ReconfigError("plant: actuation dimension mismatch");
    if (w.size() != d.coupling_dim) throw ReconfigError("plant: coupling dimension mismatch");

    PlantStep out;
    out.disturbance.assign(d.actuations, 0.0);
    const double dist = disturbance_at(spec.disturbance, k);
    for (std::size_t c = 0; c < d.actuations; ++c) {
      const bool hit = spec.disturbance.channels.empty() ||
                       std::find(spec.disturbance.channels.begin(), spec.disturbance.channels.end(),
                                 c) != spec.disturbance.channels.end();
      if (hit) out.disturbance[c] = dist;
    }
    std::vector<double> eff(d.actuations);
    for (std::size_t c = 0; c < d.actuations; ++c) eff[c] = u[c] + out.disturbance[c];

    std::vector<double> y = d.bias;
    for (std::size_t lag = 1; lag <= d.ar.size(); ++lag)
      for (std::size_t i = 0; i < d.outputs; ++i)
        for (std::size_t j = 0; j < d.outputs; ++j) y[i] += d.ar[lag - 1][i][j] * st.outputs_[lag - 1][j];
    for (std::size_t lag = 0; lag < d.input.size(); ++lag) {
      const auto& a = lag == 0 ? eff : st.actuations_[lag - 1];
      for (std::size_t i = 0; i < d.outputs; ++i)
        for (std::size_t c = 0; c < d.actuations; ++c) y[i] += d.input[lag][i][c] * a[c];
    }
    for (std::size_t i = 0; i < d.outputs && d.coupling_dim > 0; ++i)
      for (std::size_t j = 0; j < d.coupling_dim; ++j) y[i] += d.coupling[i][j] * w[j];
    if (!d.quadratic.empty())
      for (std::size_t i = 0; i < d.outputs; ++i)
        for (std::size_t c = 0; c < d.actuations; ++c) y[i] += d.quadratic[i][c] * eff[c] * eff[c];

    if (!st.outputs_.empty()) {
      st.outputs_.pop_back();
      st.outputs_.push_front(y);
    }
    if (!st.actuations_.empty()) {
      st.actuations_.pop_back();
      st.actuations_.push_front(eff);
    }

    out.y = y;
    if (spec.noise_std > 0.0) {
      std::normal_distribution<double> noise(0.0, spec.noise_std);
      for (auto& v : out.y) v += noise(st.noise_rng_);
    }
    return out;
  }
};

PlantStep step_plant(const PlantSpec& spec, PlantState& state, const std::vector<double>& u,
                     const std::vector<double>& w, long k) {
  return PlantStepper::step(spec, state, u, w, k);
}

OperatingDataset generate_dataset(const PlantSpec& spec, const Excitation& excitation,
                                  std::size_t cycles, std::uint64_t seed) {
  if (cycles < 1) throw ReconfigError("generate_dataset: cycles must be >= 1");
  spec.check();
  const auto& d = spec.dynamics;
  if (excitation.actuation.size() != d.actuations)
    throw ReconfigError("generate_dataset: excitation bounds do not match actuation dimension");

  OperatingDataset data{d.actuations, d.outputs, d.coupling_dim, {}};
  PlantState state(spec);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t t = 0; t < cycles; ++t) {
    const long k = static_cast<long>(t) + 1;
    std::vector<double> u(d.actuations);
    for (std::size_t c = 0; c < d.actuations; ++c) {
      const auto& b = excitation.actuation[c];
      u[c] = b.lo + (b.hi - b.lo) * unit(rng);
    }
    std::vector<double> w(d.coupling_dim);
    for (auto& v : w) v = excitation.coupling_lo + (excitation.coupling_hi - excitation.coupling_lo) * unit(rng);
    auto step = step_plant(spec, state, u, w, k);
    data.records.push_back({k, u, step.disturbance, w, step.y});
  }
  return data;
}

}  // namespace reconfig
