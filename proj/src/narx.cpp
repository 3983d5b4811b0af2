#include "reconfig/narx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace reconfig {

// ------------------------------------------------------------ normalizer

Normalizer Normalizer::identity(std::size_t n) {
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
}

Normalizer Normalizer::fit(const std::vector<std::vector<double>>& rows, std::size_t n) {
  Normalizer out = identity(n);
  if (rows.empty()) return out;
  const double count = static_cast<double>(rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[i];
    mean /= count;
    double var = 0.0;
    for (const auto& r : rows) var += (r[i] - mean) * (r[i] - mean);
    const double sd = std::sqrt(var / count);
    // Constant columns keep unit scale around their mean.
    out.shift[i] = mean;
    out.scale[i] = sd > 1e-8 ? sd : 1.0;
  }
  return out;
}

std::vector<double> Normalizer::apply(std::span<const double> x) const {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - shift[i]) / scale[i];
  return out;
}

std::vector<double> Normalizer::invert(std::span<const double> x) const {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * scale[i] + shift[i];
  return out;
}

double AffineMap::operator()(std::span<const double> y) const {
  if (y.size() != coefficients.size())
    throw ReconfigError("effort map expects " + std::to_string(coefficients.size()) +
                        " inputs, got " + std::to_string(y.size()));
  double acc = offset;
  for (std::size_t i = 0; i < y.size(); ++i) acc += coefficients[i] * y[i];
  return acc;
}

// ----------------------------------------------------------------- model

NarxModel NarxModel::create(std::string id, NarxShape shape, std::uint64_t seed) {
  NarxModel m;
  m.id = std::move(id);
  m.shape = shape;
  m.seed = seed;

  std::vector<std::size_t> f_sizes{shape.process_input_width()};
  std::vector<std::size_t> h_sizes{shape.disturbance_input_width()};
  for (auto w : shape.hidden) {
    f_sizes.push_back(w);
    h_sizes.push_back(w);
  }
  f_sizes.push_back(shape.outputs);
  h_sizes.push_back(shape.actuations);
  m.process_net = Mlp(f_sizes, seed);
  m.disturbance_net = Mlp(h_sizes, seed ^ 0x9e3779b97f4a7c15ULL);

  m.process_in = Normalizer::identity(shape.process_input_width());
  m.process_out = Normalizer::identity(shape.outputs);
  m.disturbance_in = Normalizer::identity(shape.disturbance_input_width());
  m.disturbance_out = Normalizer::identity(shape.actuations);
  for (auto& c : m.criteria) c.effort_map.coefficients.assign(shape.outputs, 1.0);
  m.output_range.assign(shape.outputs, Interval{0.0, 1e12});
  return m;
}

namespace {

bool within(const std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi) {
  return std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return i >= lo && i <= hi; });
}

bool contains(const std::vector<std::size_t>& idx, std::size_t i) {
  return std::find(idx.begin(), idx.end(), i) != idx.end();
}

std::size_t retained_count(const NarxShape& s, const CriterionSubsets& c) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.outputs; ++i) n += contains(c.excluded_outputs, i) ? 0 : 1;
  return n;
}

}  // namespace

void NarxModel::check() const {
  const auto& s = shape;
  auto fail = [&](const std::string& what) { throw ReconfigError("model " + id + ": " + what); };
  if (s.outputs < 1 || s.actuations < 1) fail("output and actuation dimensions must be >= 1");
  if (s.output_lags < 1 || s.actuation_lags < 1) fail("lag horizons must be >= 1");
  if (!(s.horizon > 0.0)) fail("horizon must be positive");
  if (process_net.input_size() != s.process_input_width() || process_net.output_size() != s.outputs)
    fail("process network shape does not match model dimensions");
  if (disturbance_net.input_size() != s.disturbance_input_width() ||
      disturbance_net.output_size() != s.actuations)
    fail("disturbance network shape does not match model dimensions");
  if (!process_net.all_finite() || !disturbance_net.all_finite()) fail("non-finite weights");
  if (process_in.shift.size() != s.process_input_width() ||
      process_in.scale.size() != s.process_input_width() ||
      process_out.shift.size() != s.outputs || process_out.scale.size() != s.outputs ||
      disturbance_in.shift.size() != s.disturbance_input_width() ||
      disturbance_in.scale.size() != s.disturbance_input_width() ||
      disturbance_out.shift.size() != s.actuations || disturbance_out.scale.size() != s.actuations)
    fail("normalization constants have wrong size");
  for (Criterion z : kCriteria) {
    const auto& c = criteria[index_of(z)];
    const std::string name(to_string(z));
    if (!within(c.excluded_outputs, 0, s.outputs - 1)) fail(name + ": output index out of range");
    if (!within(c.excluded_output_lags, 1, s.output_lags)) fail(name + ": output lag out of range");
    if (!within(c.excluded_actuations, 0, s.actuations - 1))
      fail(name + ": actuation index out of range");
    if (!within(c.excluded_actuation_lags, 0, s.actuation_lags))
      fail(name + ": actuation lag out of range");
    if (!c.excluded_coupling.empty() && (s.coupling == 0 || !within(c.excluded_coupling, 0, s.coupling - 1)))
      fail(name + ": coupling index out of range");
    if (c.effort_map.coefficients.size() != retained_count(s, c))
      fail(name + ": effort map needs one coefficient per retained output");
  }
  if (output_range.size() != s.outputs) fail("output range needs one interval per output");
  for (const auto& r : output_range)
    if (!r.is_valid()) fail("output range with lo > hi");
  if (!recent_disturbances.empty()) {
    if (recent_disturbances.size() != s.actuation_lags) fail("disturbance window length");
    for (const auto& d : recent_disturbances)
      if (d.size() != s.actuations) fail("disturbance window width");
  }
}

// --------------------------------------------------------------- history

ProcessHistory::ProcessHistory(const NarxShape& shape)
    : outputs_(shape.output_lags, std::vector<double>(shape.outputs, 0.0)),
      actuations_(shape.actuation_lags, std::vector<double>(shape.actuations, 0.0)),
      disturbances_(shape.actuation_lags, std::vector<double>(shape.actuations, 0.0)),
      coupling_(shape.coupling, 0.0) {}

void ProcessHistory::set_coupling(std::vector<double> w) {
  if (w.size() != coupling_.size()) throw ReconfigError("coupling dimension mismatch");
  coupling_ = std::move(w);
}

void ProcessHistory::set_disturbances(const std::vector<std::vector<double>>& window) {
  if (window.size() != disturbances_.size()) throw ReconfigError("disturbance window length mismatch");
  for (const auto& d : window)
    if (d.size() != actuations_.front().size()) throw ReconfigError("disturbance width mismatch");
  disturbances_ = window;
}

namespace {

template <class T>
void shift_in(std::vector<std::vector<T>>& window, std::span<const T> value) {
  if (window.empty()) return;
  if (value.size() != window.front().size()) throw ReconfigError("history dimension mismatch");
  std::rotate(window.rbegin(), window.rbegin() + 1, window.rend());
  window.front().assign(value.begin(), value.end());
}

std::vector<double> assemble_process_input(const NarxShape& s, const ProcessHistory& h,
                                           const EffectiveActuation& eff, long k) {
  std::vector<double> x(s.process_input_width(), 0.0);
  for (std::size_t lag = 1; lag <= s.output_lags; ++lag)
    for (std::size_t i = 0; i < s.outputs; ++i)
      x[s.output_lag_offset(lag, i)] = h.outputs()[lag - 1][i];
  for (std::size_t c = 0; c < s.actuations; ++c) x[s.actuation_lag_offset(0, c)] = eff.current[c];
  for (std::size_t lag = 1; lag <= s.actuation_lags; ++lag)
    for (std::size_t c = 0; c < s.actuations; ++c)
      x[s.actuation_lag_offset(lag, c)] = eff.lagged[lag - 1][c];
  for (std::size_t i = 0; i < s.coupling; ++i) x[s.coupling_offset(i)] = h.coupling()[i];
  x[s.phase_offset()] = static_cast<double>(k) / s.horizon;
  return x;
}

std::vector<double> disturbance_input(const NarxShape& s,
                                      const std::vector<std::vector<double>>& window, long k) {
  std::vector<double> x;
  x.reserve(s.disturbance_input_width());
  for (const auto& d : window) x.insert(x.end(), d.begin(), d.end());
  x.push_back(static_cast<double>(k) / s.horizon);
  return x;
}

void check_actuation(const NarxShape& s, std::span<const double> u) {
  if (u.size() != s.actuations)
    throw ReconfigError("actuation dimension mismatch: expected " + std::to_string(s.actuations) +
                        ", got " + std::to_string(u.size()));
}

void check_history(const NarxShape& s, const ProcessHistory& h) {
  if (h.outputs().size() != s.output_lags || h.actuations().size() != s.actuation_lags ||
      h.coupling().size() != s.coupling || h.outputs().front().size() != s.outputs ||
      h.actuations().front().size() != s.actuations)
    throw ReconfigError("history does not match model dimensions");
}

}  // namespace

void ProcessHistory::advance(std::span<const double> y, std::span<const double> u,
                             std::span<const double> disturbance) {
  shift_in(outputs_, y);
  shift_in(actuations_, u);
  shift_in(disturbances_, disturbance);
}

// ------------------------------------------------------------ prediction

std::vector<double> estimate_disturbance(const NarxModel& model, const ProcessHistory& history,
                                         long k) {
  check_history(model.shape, history);
  auto x = disturbance_input(model.shape, history.disturbances(), k);
  auto out = model.disturbance_net.forward(model.disturbance_in.apply(x));
  return model.disturbance_out.invert(out);
}

EffectiveActuation effective_actuation(const ProcessHistory& history,
                                       std::span<const double> u_now,
                                       std::span<const double> disturbance_estimate) {
  if (u_now.size() != disturbance_estimate.size())
    throw ReconfigError("actuation and disturbance dimensions differ");
  EffectiveActuation eff;
  eff.current.resize(u_now.size());
  for (std::size_t c = 0; c < u_now.size(); ++c) eff.current[c] = u_now[c] + disturbance_estimate[c];
  for (std::size_t lag = 0; lag < history.actuations().size(); ++lag) {
    const auto& u = history.actuations()[lag];
    const auto& d = history.disturbances()[lag];
    std::vector<double> v(u.size());
    for (std::size_t c = 0; c < u.size(); ++c) v[c] = u[c] + d[c];
    eff.lagged.push_back(std::move(v));
  }
  return eff;
}

std::vector<double> process_input(const NarxModel& model, const ProcessHistory& history,
                                  std::span<const double> u_now, long k) {
  check_actuation(model.shape, u_now);
  auto dhat = estimate_disturbance(model, history, k);
  auto eff = effective_actuation(history, u_now, dhat);
  return assemble_process_input(model.shape, history, eff, k);
}

std::vector<double> predict(const NarxModel& model, const ProcessHistory& history,
                            std::span<const double> u_now, long k) {
  auto x = process_input(model, history, u_now, k);
  auto out = model.process_net.forward(model.process_in.apply(x));
  return model.process_out.invert(out);
}

CriterionView::CriterionView(const NarxModel& model, Criterion z) : model_(&model), z_(z) {
  const auto& s = model.shape;
  const auto& c = model.criteria[index_of(z)];
  keep_input_.assign(s.process_input_width(), true);
  for (std::size_t lag = 1; lag <= s.output_lags; ++lag)
    for (std::size_t i = 0; i < s.outputs; ++i)
      if (contains(c.excluded_output_lags, lag) || contains(c.excluded_outputs, i))
        keep_input_[s.output_lag_offset(lag, i)] = false;
  for (std::size_t lag = 0; lag <= s.actuation_lags; ++lag)
    for (std::size_t ch = 0; ch < s.actuations; ++ch)
      if (contains(c.excluded_actuation_lags, lag) || contains(c.excluded_actuations, ch))
        keep_input_[s.actuation_lag_offset(lag, ch)] = false;
  for (std::size_t i = 0; i < s.coupling; ++i)
    if (contains(c.excluded_coupling, i)) keep_input_[s.coupling_offset(i)] = false;
  for (std::size_t i = 0; i < s.outputs; ++i)
    if (!contains(c.excluded_outputs, i)) retained_outputs_.push_back(i);
}

std::vector<double> CriterionView::predict(const ProcessHistory& history,
                                           std::span<const double> u_now, long k) const {
  auto x = process_input(*model_, history, u_now, k);
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!keep_input_[i]) x[i] = model_->process_in.shift[i];
  auto full = model_->process_out.invert(model_->process_net.forward(model_->process_in.apply(x)));
  std::vector<double> out;
  out.reserve(retained_outputs_.size());
  for (auto i : retained_outputs_) out.push_back(full[i]);
  return out;
}

CriterionView project_criterion(const NarxModel& model, Criterion z, double weight) {
  CriterionView view(model, z);
  if (view.retained_outputs().empty() && weight > 0.0)
    throw ReconfigError("model " + model.id + ": criterion " + std::string(to_string(z)) +
                        " carries weight but retains no output");
  return view;
}

double service_effort(const AffineMap& g, const std::vector<std::vector<double>>& trajectory) {
  double total = 0.0;
  for (const auto& y : trajectory) total += g(y);
  return total;
}

double service_effort(const NarxModel& model, Criterion z,
                      const std::vector<std::vector<double>>& trajectory) {
  return service_effort(model.criteria[index_of(z)].effort_map, trajectory);
}

// -------------------------------------------------------------- training

namespace {

ProcessHistory history_at(const NarxShape& s, const OperatingDataset& data, std::size_t t) {
  ProcessHistory h(s);
  const std::size_t depth = std::max(s.output_lags, s.actuation_lags);
  const std::size_t first = t >= depth ? t - depth : 0;
  for (std::size_t i = first; i < t; ++i) {
    const auto& r = data.records[i];
    h.advance(r.y, r.u, r.disturbance);
  }
  if (s.coupling > 0) h.set_coupling(data.records[t].coupling);
  return h;
}

void check_dataset(const NarxModel& model, const OperatingDataset& data) {
  data.check();
  const auto& s = model.shape;
  if (data.actuation_dim != s.actuations || data.output_dim != s.outputs ||
      data.coupling_dim != s.coupling)
    throw ReconfigError("dataset dimensions do not match model " + model.id);
}

struct SampleLoss {
  double process = 0.0;
  double disturbance = 0.0;
};

}  // namespace

std::vector<TrainingSample> make_samples(const NarxModel& model, const OperatingDataset& data) {
  check_dataset(model, data);
  const auto& s = model.shape;
  std::vector<TrainingSample> samples;
  samples.reserve(data.size());
  for (std::size_t t = 0; t < data.size(); ++t) {
    const auto& r = data.records[t];
    auto hist = history_at(s, data, t);
    // Teacher forcing: the current effective actuation uses the observed
    // disturbance of cycle k.
    auto eff = effective_actuation(hist, r.u, r.disturbance);
    TrainingSample smp;
    smp.process_input = assemble_process_input(s, hist, eff, r.k);
    smp.process_target = r.y;
    smp.disturbance_input = disturbance_input(s, hist.disturbances(), r.k);
    smp.disturbance_target = r.disturbance;
    samples.push_back(std::move(smp));
  }
  return samples;
}

double loss(const NarxModel& model, std::span<const TrainingSample> batch) {
  if (batch.empty()) throw ReconfigError("loss of an empty batch");
  double lf = 0.0, lh = 0.0;
  for (const auto& smp : batch) {
    auto out = model.process_net.forward(model.process_in.apply(smp.process_input));
    auto tgt = model.process_out.apply(smp.process_target);
    double e = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) e += (out[i] - tgt[i]) * (out[i] - tgt[i]);
    lf += e / static_cast<double>(out.size());

    auto dout = model.disturbance_net.forward(model.disturbance_in.apply(smp.disturbance_input));
    auto dtgt = model.disturbance_out.apply(smp.disturbance_target);
    double ed = 0.0;
    for (std::size_t i = 0; i < dout.size(); ++i) ed += (dout[i] - dtgt[i]) * (dout[i] - dtgt[i]);
    lh += ed / static_cast<double>(dout.size());
  }
  const double n = static_cast<double>(batch.size());
  return lf / n + lh / n;
}

NarxGradient gradient_of_loss(const NarxModel& model, std::span<const TrainingSample> batch) {
  if (batch.empty()) throw ReconfigError("gradient of an empty batch");
  NarxGradient g{std::vector<double>(model.process_net.parameter_count(), 0.0),
                 std::vector<double>(model.disturbance_net.parameter_count(), 0.0)};
  const double n = static_cast<double>(batch.size());
  for (const auto& smp : batch) {
    auto trace = model.process_net.forward_trace(model.process_in.apply(smp.process_input));
    auto tgt = model.process_out.apply(smp.process_target);
    const auto& out = trace.values.back();
    std::vector<double> dout(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
      dout[i] = 2.0 * (out[i] - tgt[i]) / (static_cast<double>(out.size()) * n);
    model.process_net.backward(trace, dout, g.process);

    auto dtrace =
        model.disturbance_net.forward_trace(model.disturbance_in.apply(smp.disturbance_input));
    auto dtgt = model.disturbance_out.apply(smp.disturbance_target);
    const auto& hout = dtrace.values.back();
    std::vector<double> dh(hout.size());
    for (std::size_t i = 0; i < hout.size(); ++i)
      dh[i] = 2.0 * (hout[i] - dtgt[i]) / (static_cast<double>(hout.size()) * n);
    model.disturbance_net.backward(dtrace, dh, g.disturbance);
  }
  return g;
}

namespace {

class Adam {
public:
  Adam(std::size_t n, double lr) : m_(n, 0.0), v_(n, 0.0), lr_(lr) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    ++t_;
    const double b1t = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double b2t = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grad[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grad[i] * grad[i];
      params[i] -= lr_ * (m_[i] / b1t) / (std::sqrt(v_[i] / b2t) + kEps);
    }
  }

private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  std::vector<double> m_, v_;
  double lr_;
  long t_ = 0;
};

void fit_normalization(NarxModel& m, const std::vector<TrainingSample>& samples) {
  std::vector<std::vector<double>> fin, fout, hin, hout;
  for (const auto& s : samples) {
    fin.push_back(s.process_input);
    fout.push_back(s.process_target);
    hin.push_back(s.disturbance_input);
    hout.push_back(s.disturbance_target);
  }
  const auto& sh = m.shape;
  m.process_in = Normalizer::fit(fin, sh.process_input_width());
  m.process_out = Normalizer::fit(fout, sh.outputs);
  m.disturbance_in = Normalizer::fit(hin, sh.disturbance_input_width());
  m.disturbance_out = Normalizer::fit(hout, sh.actuations);
  m.normalization_fitted = true;
}

}  // namespace

TrainingResult train(const NarxModel& model, const OperatingDataset& data,
                     const TrainingOptions& options) {
  model.check();
  auto samples = make_samples(model, data);
  if (samples.empty()) throw ReconfigError("training dataset is empty");

  TrainingResult result{model, {}, 0.0, 0.0};
  if (options.epochs == 0) {
    result.initial_loss = result.final_loss = loss(model, samples);
    result.loss_curve.push_back(result.initial_loss);
    return result;
  }
  if (options.batch_size == 0) throw ReconfigError("batch size must be positive");

  // Normalization constants are fitted once, on the first training data a
  // model sees, and frozen afterwards.
  NarxModel work = model;
  if (!work.normalization_fitted) fit_normalization(work, samples);
  result.model = work;
  result.initial_loss = loss(work, samples);
  if (!std::isfinite(result.initial_loss))
    throw TrainingDiverged("model " + model.id + ": initial loss is not finite");
  result.loss_curve.push_back(result.initial_loss);

  auto fp = work.process_net.parameters();
  auto hp = work.disturbance_net.parameters();
  Adam fopt(fp.size(), options.learning_rate);
  Adam hopt(hp.size(), options.learning_rate);
  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);

  double best = result.initial_loss;
  std::vector<TrainingSample> batch;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(samples[order[i]]);
      auto g = gradient_of_loss(work, batch);
      fopt.step(fp, g.process);
      hopt.step(hp, g.disturbance);
      work.process_net.set_parameters(fp);
      work.disturbance_net.set_parameters(hp);
    }
    const double l = loss(work, samples);
    if (!std::isfinite(l))
      throw TrainingDiverged("model " + model.id + ": loss diverged at epoch " +
                             std::to_string(epoch + 1));
    result.loss_curve.push_back(l);
    if (l < best) {
      best = l;
      result.model = work;
    }
  }
  result.final_loss = best;
  return result;
}

double one_step_mse(const NarxModel& model, const OperatingDataset& data, std::size_t first) {
  check_dataset(model, data);
  if (first >= data.size()) throw ReconfigError("mse of an empty dataset");
  double acc = 0.0;
  for (std::size_t t = first; t < data.size(); ++t) {
    const auto& r = data.records[t];
    auto hist = history_at(model.shape, data, t);
    auto yhat = predict(model, hist, r.u, r.k);
    for (std::size_t i = 0; i < yhat.size(); ++i) acc += (yhat[i] - r.y[i]) * (yhat[i] - r.y[i]);
  }
  return acc / static_cast<double>((data.size() - first) * model.shape.outputs);
}

}  // namespace reconfig
