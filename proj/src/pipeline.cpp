#include "reconfig/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

namespace reconfig {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t derive_seed(std::uint64_t base, std::string_view name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = base ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::optional<ProductionStep> parse_model_key(std::string_view key) {
  const auto a = key.find("__");
  if (a == std::string_view::npos) return std::nullopt;
  const auto b = key.find("__", a + 2);
  if (b == std::string_view::npos || key.find("__", b + 2) != std::string_view::npos) return std::nullopt;
  ProductionStep s{std::string(key.substr(0, a)), std::string(key.substr(a + 2, b - a - 2)),
                   std::string(key.substr(b + 2))};
  if (s.module_id.empty() || s.configuration_id.empty() || s.operator_id.empty()) return std::nullopt;
  return s;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(jobs, n); ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// -------------------------------------------------------------- model store

namespace {

constexpr int kIndexFormat = 1;

void write_atomically(const fs::path& file, const std::string& text) {
  const fs::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ReconfigError("cannot write " + tmp.string());
    out << text;
    if (!out) throw ReconfigError("write failed for " + tmp.string());
  }
  fs::rename(tmp, file);
}

json read_json(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ReconfigError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ReconfigError(file.string() + ": " + e.what());
  }
}

}  // namespace

ModelStore::ModelStore(fs::path dir) : dir_(std::move(dir)) {
  const fs::path index = dir_ / "index.json";
  if (!fs::exists(index)) return;
  const json j = read_json(index);
  try {
    if (j.at("format").get<int>() != kIndexFormat) throw ReconfigError("model index: unsupported format");
    store_version_ = j.at("store_version").get<int>();
    for (const auto& [key, v] : j.at("models").items())
      entries_[key] = {v.at("version").get<int>(), v.at("provenance").get<std::string>()};
  } catch (const json::exception& e) {
    throw ReconfigError("model index: " + std::string(e.what()));
  }
}

bool ModelStore::contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

NarxModel ModelStore::load(std::string_view key) const {
  if (!contains(key)) throw ReconfigError("model store has no model '" + std::string(key) + "'");
  NarxModel m = model_from_json(read_json(dir_ / (std::string(key) + ".json")));
  if (m.id != key) throw ReconfigError("model file " + std::string(key) + " holds model '" + m.id + "'");
  return m;
}

void ModelStore::put(const NarxModel& model, std::string provenance) {
  fs::create_directories(dir_);
  write_atomically(dir_ / (model.id + ".json"), model_to_json(model).dump(1) + "\n");
  entries_[model.id] = {model.version, std::move(provenance)};
  write_index();
}

void ModelStore::bump_store_version() {
  ++store_version_;
  fs::create_directories(dir_);
  write_index();
}

void ModelStore::write_index() const {
  json models = json::object();
  for (const auto& [key, info] : entries_)
    models[key] = {{"file", key + ".json"}, {"version", info.version}, {"provenance", info.provenance}};
  json j{{"format", kIndexFormat}, {"store_version", store_version_}, {"models", models}};
  write_atomically(dir_ / "index.json", j.dump(2) + "\n");
}

// ------------------------------------------------------------------ models

namespace {

struct StepContext {
  const ProcessOperator* op = nullptr;
  const ProcessModelSpec* spec = nullptr;
};

StepContext resolve(const Scenario& sc, const ProductionStep& step) {
  const auto* m = sc.system.find_module(step.module_id);
  const auto* c = m ? m->find_configuration(step.configuration_id) : nullptr;
  const auto* op = c ? c->find_operator(step.operator_id) : nullptr;
  if (!op) throw ReconfigError("no operator for model key '" + model_key(step) + "'");
  const auto* spec = sc.find_process_model(op->model_id);
  if (!spec) throw ReconfigError("no process model '" + op->model_id + "'");
  return {op, spec};
}

TrainingOptions training_options(const Scenario& sc, std::uint64_t seed) {
  TrainingOptions o;
  o.learning_rate = sc.training.learning_rate;
  o.epochs = sc.training.epochs;
  o.batch_size = sc.training.batch_size;
  o.seed = seed;
  return o;
}

void check_compatible(const NarxModel& m, const StepContext& ctx) {
  if (!(m.shape == ctx.spec->shape))
    throw ReconfigError("stored model '" + m.id + "' does not match the shape of template '" + ctx.spec->id + "'");
}

}  // namespace

std::vector<ProductionStep> all_steps(const ProductionSystem& system) {
  std::vector<ProductionStep> out;
  for (const auto& m : system.modules)
    for (const auto& c : m.configurations)
      for (const auto& op : c.operators) out.push_back({m.id, c.id, op.id});
  std::sort(out.begin(), out.end(),
            [](const ProductionStep& a, const ProductionStep& b) { return model_key(a) < model_key(b); });
  return out;
}

NarxModel bootstrap_model(const Scenario& sc, const ProductionStep& step, std::uint64_t seed) {
  const auto ctx = resolve(sc, step);
  const std::string key = model_key(step);
  const std::uint64_t base = seed ^ ctx.spec->seed;
  NarxModel model = instantiate_model(*ctx.spec, key, derive_seed(base, "init/" + key));
  const auto data = generate_dataset(plant_of(*ctx.spec, false, derive_seed(base, "noise/" + key)),
                                     excitation_of(*ctx.spec, *ctx.op), sc.training.bootstrap_cycles,
                                     derive_seed(base, "excite/" + key));
  auto result = train(model, data, training_options(sc, derive_seed(base, "train/" + key)));
  result.model.version = 1;
  return std::move(result.model);
}

ModelSet ensure_models(const Scenario& sc, ModelStore& store, std::uint64_t seed, const LogSink& log) {
  ModelSet out;
  for (const auto& step : all_steps(sc.system)) {
    const std::string key = model_key(step);
    const auto ctx = resolve(sc, step);
    if (store.contains(key)) {
      auto m = store.load(key);
      check_compatible(m, ctx);
      out.emplace(key, std::make_shared<const NarxModel>(std::move(m)));
      continue;
    }
    if (log) log("bootstrapping model " + key + " from clean design data");
    auto m = bootstrap_model(sc, step, seed);
    store.put(m, "bootstrap: " + std::to_string(sc.training.bootstrap_cycles) + " clean design cycles");
    out.emplace(key, std::make_shared<const NarxModel>(std::move(m)));
  }
  return out;
}

OperatingDataset generate_operating_data(const Scenario& sc, const ProductionStep& step, std::size_t cycles,
                                         bool with_anomaly, std::uint64_t seed) {
  const auto ctx = resolve(sc, step);
  const std::string key = model_key(step);
  return generate_dataset(plant_of(*ctx.spec, with_anomaly, derive_seed(seed, "operate-noise/" + key)),
                          excitation_of(*ctx.spec, *ctx.op), cycles, derive_seed(seed, "operate/" + key));
}

// ------------------------------------------------------------------- adapt

bool AdaptReport::updated() const {
  return std::any_of(entries.begin(), entries.end(), [](const AdaptEntry& e) { return e.status == "updated"; });
}

json AdaptReport::to_json() const {
  json list = json::array();
  for (const auto& e : entries) {
    json j{{"model", e.key}, {"status", e.status}};
    if (!e.message.empty()) j["message"] = e.message;
    if (e.status != "rejected") {
      j["train_samples"] = e.train_samples;
      j["held_out_samples"] = e.held_out_samples;
      j["pre_mse"] = e.pre_mse;
    }
    if (e.status == "updated") {
      j["post_mse"] = e.post_mse;
      j["version"] = e.version;
    }
    list.push_back(j);
  }
  json out{{"store_version", store_version}, {"models", list}};
  if (!updated()) out["summary"] = "no updates";
  return out;
}

AdaptReport adapt_models(const Scenario& sc, ModelStore& store, const std::vector<fs::path>& datasets,
                         std::uint64_t seed, const LogSink& log) {
  AdaptReport report;
  for (const auto& path : datasets) {
    AdaptEntry e;
    e.key = path.stem().string();
    try {
      const auto step = parse_model_key(e.key);
      if (!step) throw ReconfigError("file name is not a model key (module__configuration__operator)");
      const auto ctx = resolve(sc, *step);
      NarxModel model;
      if (store.contains(e.key)) {
        model = store.load(e.key);
        check_compatible(model, ctx);
      } else {
        if (log) log("bootstrapping model " + e.key + " before adaptation");
        model = bootstrap_model(sc, *step, seed);
        store.put(model, "bootstrap: " + std::to_string(sc.training.bootstrap_cycles) + " clean design cycles");
      }
      const auto data = load_csv(path);
      if (data.actuation_dim != model.shape.actuations || data.output_dim != model.shape.outputs ||
          data.coupling_dim != model.shape.coupling)
        throw ReconfigError("dataset dimensions do not match the model");
      const auto n_train = static_cast<std::size_t>(std::floor(kTrainFraction * static_cast<double>(data.size())));
      if (n_train < 2 || n_train >= data.size())
        throw ReconfigError("dataset too small for a train / held-out split");
      e.train_samples = n_train;
      e.held_out_samples = data.size() - n_train;
      e.pre_mse = one_step_mse(model, data, n_train);

      const auto train_seed = derive_seed(seed, "adapt/" + e.key + "/" + std::to_string(model.version));
      TrainingResult trained;
      try {
        trained = train(model, data.slice(0, n_train), training_options(sc, train_seed));
      } catch (const TrainingDiverged& d) {
        e.status = "diverged";
        e.message = d.what();
        report.entries.push_back(std::move(e));
        continue;
      }
      NarxModel updated = std::move(trained.model);
      e.post_mse = one_step_mse(updated, data, n_train);
      updated.version = model.version + 1;
      updated.recent_disturbances.clear();
      for (std::size_t lag = 1; lag <= updated.shape.actuation_lags; ++lag) {
        if (lag <= data.size())
          updated.recent_disturbances.push_back(data.records[data.size() - lag].disturbance);
        else
          updated.recent_disturbances.emplace_back(updated.shape.actuations, 0.0);
      }
      e.version = updated.version;
      store.put(updated, "adapt: " + path.filename().string() + ", " + std::to_string(n_train) + " training cycles");
      e.status = "updated";
    } catch (const ReconfigError& err) {
      e.status = "rejected";
      e.message = err.what();
    }
    if (log) log("adapt " + e.key + ": " + e.status + (e.message.empty() ? "" : " (" + e.message + ")"));
    report.entries.push_back(std::move(e));
  }
  if (report.updated()) store.bump_store_version();
  report.store_version = store.store_version();
  return report;
}

// ---------------------------------------------------------------- pipeline

SequenceOptimization optimize_sequence(const SimulationPlan& plan, const ProductionSequence& sequence,
                                       const ProductionOrder& order, const OptimizerSettings& settings,
                                       std::uint64_t seed) {
  const auto strategy = make_strategy(settings);
  const auto bounds = plan.parameter_bounds();
  EffortObjective objective = [&](std::span<const double> u) {
    return simulate(plan, plan.unflatten(u), order.lot_size).f;
  };
  const std::string key = to_string(sequence);
  SequenceOptimization out;
  out.sequence = sequence;
  std::array<EffortVector, 3> optima;
  for (Criterion z : kCriteria) {
    const auto s = derive_seed(seed, "search/" + key + "/" + std::string(to_string(z)));
    out.single[index_of(z)] = optimize_single(objective, bounds, z, *strategy, settings.single_budget, s);
    optima[index_of(z)] = out.single[index_of(z)].efforts;
  }
  out.ranges = normalization_ranges(optima);
  out.weighted = optimize_weighted(objective, bounds, order.weights, out.ranges, *strategy,
                                   settings.weighted_budget, derive_seed(seed, "search/" + key + "/weighted"));
  return out;
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::selected: return "reconfiguration-selected";
    case RunStatus::no_demand: return "no-reconfiguration-needed";
    case RunStatus::no_feasible: return "no-feasible-configuration";
  }
  return "unknown";
}

PipelineResult run_pipeline(const Scenario& sc, const ModelSet& models, const RunOptions& options,
                            const LogSink& log) {
  PipelineResult res;
  auto stage = [&](const std::string& name) {
    res.stages.push_back(name);
    if (log) log("stage: " + name);
  };
  for (const auto& [key, m] : models) res.model_versions[key] = m->version;

  stage("identify_demand");
  auto demand = identify_demand(sc.system, sc.order, sc.search);
  if (!demand.demand_exists) {
    res.status = RunStatus::no_demand;
    res.current_sequences = std::move(demand.feasible_sequences);
    return res;
  }

  stage("generate_alternatives");
  const auto search = generate_alternatives(sc.system, sc.order, sc.search);
  res.warnings = search.warnings;
  res.expanded = search.expanded;
  res.sequences = search.drafts.size();

  stage("layouts");
  struct Placement {
    ProductionSequence sequence;
    std::vector<std::pair<LayoutAssignment, EffortVector>> layouts;
  };
  std::vector<Placement> placements;
  for (const auto& d : search.drafts) {
    Placement p{d.steps, {}};
    for (const auto& v : enumerate_layouts(d.steps, sc.system.layout, occupied_by_others(sc.system, d.steps)))
      if (auto eff = reconfiguration_effort(v, sc.system, d.steps)) p.layouts.emplace_back(v.assignment, *eff);
    if (!p.layouts.empty()) placements.push_back(std::move(p));
  }
  if (placements.empty()) {
    res.status = RunStatus::no_feasible;
    return res;
  }

  stage("optimize");
  std::vector<SimulationPlan> plans;
  for (const auto& p : placements) plans.push_back(make_plan(sc.system, p.sequence, models));
  res.optimizations.resize(placements.size());
  parallel_for(placements.size(), options.jobs, [&](std::size_t i) {
    res.optimizations[i] = optimize_sequence(plans[i], placements[i].sequence, sc.order, sc.optimizer, options.seed);
  });

  stage("evaluate");
  std::vector<SystemConfiguration> candidates;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    const auto& opt = res.optimizations[i];
    for (const auto& w : opt.weighted.warnings) res.warnings.push_back(to_string(opt.sequence) + ": " + w);
    for (const auto& [layout, effort] : placements[i].layouts) {
      SystemConfiguration c;
      c.sequence = placements[i].sequence;
      c.layout = layout;
      c.reconfiguration = effort;
      c.parameters = plans[i].unflatten(opt.weighted.parameters);
      c.production = opt.weighted.efforts;
      candidates.push_back(std::move(c));
    }
  }
  res.ranking = rank(std::move(candidates), sc.order.weights);

  stage("select");
  for (const auto& c : res.ranking.ranked) {
    std::size_t origin = 0;
    while (!(placements[origin].sequence == c.sequence)) ++origin;
    res.candidate_origin.push_back(origin);
  }
  res.status = RunStatus::selected;
  return res;
}

// ---------------------------------------------------------------- reports

namespace {

json effort_json(const EffortVector& e) { return {{"time", e.time()}, {"energy", e.energy()}, {"cost", e.cost()}}; }

json triple_json(const std::array<double, 3>& v) { return {{"time", v[0]}, {"energy", v[1]}, {"cost", v[2]}}; }

json sequence_json(const ProductionSequence& seq) {
  json j = json::array();
  for (const auto& s : seq)
    j.push_back({{"module", s.module_id}, {"configuration", s.configuration_id}, {"operator", s.operator_id}});
  return j;
}

json layout_json(const LayoutAssignment& layout) {
  json j = json::object();
  for (const auto& [m, loc] : layout) j[m] = loc;
  return j;
}

json configuration_json(const SystemConfiguration& c) {
  return {{"sequence", sequence_json(c.sequence)},
          {"layout", layout_json(c.layout)},
          {"parameters", c.parameters},
          {"reconfiguration", effort_json(c.reconfiguration)},
          {"production", effort_json(c.production)},
          {"total", effort_json(c.total)},
          {"evaluation", triple_json(c.evaluation)},
          {"utility", c.utility}};
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

}  // namespace

json report_json(const Scenario& sc, const PipelineResult& res, const RunOptions& options) {
  json j;
  j["status"] = to_string(res.status);
  j["seed"] = options.seed;
  j["stages"] = res.stages;
  j["model_store_version"] = res.store_version;
  j["models"] = res.model_versions;
  j["weights"] = triple_json(sc.order.weights.values());
  j["lot_size"] = sc.order.lot_size;
  j["warnings"] = res.warnings;
  if (res.status == RunStatus::no_demand) {
    json seqs = json::array();
    for (const auto& s : res.current_sequences) seqs.push_back(sequence_json(s));
    j["current_feasible_sequences"] = seqs;
    return j;
  }
  j["search"] = {{"sequences", res.sequences}, {"expanded", res.expanded}};
  json opts = json::array();
  for (const auto& o : res.optimizations) {
    json single = json::object();
    for (Criterion z : kCriteria) {
      const auto& s = o.single[index_of(z)];
      single[std::string(to_string(z))] = {{"parameters", s.parameters},
                                           {"efforts", effort_json(s.efforts)},
                                           {"evaluations", s.evaluations},
                                           {"seed", s.seed}};
    }
    opts.push_back({{"sequence", sequence_json(o.sequence)},
                    {"single", single},
                    {"ranges", {{"min", triple_json(o.ranges.min)}, {"max", triple_json(o.ranges.max)}}},
                    {"weighted",
                     {{"parameters", o.weighted.parameters},
                      {"objective", o.weighted.objective},
                      {"efforts", effort_json(o.weighted.efforts)},
                      {"evaluations", o.weighted.evaluations},
                      {"seed", o.weighted.seed}}}});
  }
  j["optimizations"] = opts;
  json ranked = json::array();
  for (std::size_t i = 0; i < res.ranking.ranked.size(); ++i) {
    json c = configuration_json(res.ranking.ranked[i]);
    c["rank"] = i + 1;
    ranked.push_back(c);
  }
  j["ranking"] = ranked;
  if (res.status == RunStatus::selected) j["selected"] = res.ranking.selected;
  return j;
}

json selected_json(const PipelineResult& res, const RunOptions& options) {
  json j = configuration_json(select(res.ranking));
  j["status"] = to_string(res.status);
  j["seed"] = options.seed;
  j["model_store_version"] = res.store_version;
  json versions = json::object();
  for (const auto& step : select(res.ranking).sequence) {
    const auto key = model_key(step);
    if (auto it = res.model_versions.find(key); it != res.model_versions.end()) versions[key] = it->second;
  }
  j["model_versions"] = versions;
  return j;
}

std::string report_text(const PipelineResult& res) {
  std::ostringstream os;
  os << "status: " << to_string(res.status) << "\n";
  os << "stages: ";
  for (std::size_t i = 0; i < res.stages.size(); ++i) os << (i ? " -> " : "") << res.stages[i];
  os << "\nmodel store version: " << res.store_version << "\n";
  for (const auto& w : res.warnings) os << "warning: " << w << "\n";
  if (res.status == RunStatus::no_demand) {
    os << "current configuration already fulfils the order; feasible sequences:\n";
    for (const auto& s : res.current_sequences) os << "  " << to_string(s) << "\n";
    return os.str();
  }
  if (res.status == RunStatus::no_feasible) {
    os << "no feasible system configuration (" << res.sequences << " sequences, none placeable)\n";
    return os.str();
  }
  os << res.sequences << " sequences, " << res.ranking.ranked.size() << " candidate configurations\n\n";
  os << std::fixed;
  os << std::setw(4) << "rank" << std::setw(8) << "v" << std::setw(11) << "t_tot[s]" << std::setw(11) << "E_tot[J]"
     << std::setw(11) << "C_tot" << std::setw(7) << "r_t" << std::setw(7) << "r_e" << std::setw(7) << "r_c"
     << "  layout / sequence\n";
  for (std::size_t i = 0; i < res.ranking.ranked.size(); ++i) {
    const auto& c = res.ranking.ranked[i];
    std::string layout;
    for (const auto& [m, loc] : c.layout) layout += (layout.empty() ? "" : ",") + m + "@L" + std::to_string(loc);
    os << std::setw(4) << i + 1 << std::setprecision(4) << std::setw(8) << c.utility << std::setprecision(2)
       << std::setw(11) << c.total.time() << std::setw(11) << c.total.energy() << std::setw(11) << c.total.cost()
       << std::setprecision(3) << std::setw(7) << c.evaluation[0] << std::setw(7) << c.evaluation[1]
       << std::setw(7) << c.evaluation[2] << "  " << layout << " / " << to_string(c.sequence) << "\n";
  }
  const auto& s = select(res.ranking);
  os << "\nselected: " << to_string(s.sequence) << "\n";
  os << std::setprecision(4);
  for (std::size_t j = 0; j < s.sequence.size(); ++j) {
    os << "  " << to_string(s.sequence[j]) << " U* =";
    for (double u : s.parameters[j]) os << " " << u;
    os << "\n";
  }
  return os.str();
}

// ----------------------------------------------------------------- command

int run_command(const RunManifest& manifest, const LogSink& log) {
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  auto loaded = load_scenario(manifest.scenario, manifest.lenient);
  for (const auto& issue : loaded.report.issues)
    say(std::string(issue.warning ? "warning: " : "error: ") + (issue.path.empty() ? "<root>" : issue.path) + ": " +
        issue.message);
  if (!loaded.scenario) return exit_code::validation;
  const Scenario& sc = *loaded.scenario;

  try {
    RunOptions options;
    options.seed = manifest.seed.value_or(sc.seed);
    options.jobs = std::max<std::size_t>(1, manifest.jobs);

    ModelStore store(manifest.models);
    const auto models = ensure_models(sc, store, options.seed, log);
    auto res = run_pipeline(sc, models, options, log);
    res.store_version = store.store_version();

    fs::create_directories(manifest.out);
    json report = report_json(sc, res, options);
    if (!manifest.deterministic) {
      report["generated_at"] = utc_now();
      report["jobs"] = options.jobs;
    }
    write_atomically(manifest.out / "report.json", report.dump(2) + "\n");
    write_atomically(manifest.out / "report.txt", report_text(res));
    const fs::path selected = manifest.out / "selected.json";
    if (res.status == RunStatus::selected) {
      write_atomically(selected, selected_json(res, options).dump(2) + "\n");
    } else if (fs::exists(selected)) {
      fs::remove(selected);
    }

    if (manifest.trace && res.status == RunStatus::selected) {
      const fs::path dir = manifest.out / "trace";
      fs::create_directories(dir);
      for (std::size_t i = 0; i < res.ranking.ranked.size(); ++i) {
        const auto& c = res.ranking.ranked[i];
        const auto plan = make_plan(sc.system, c.sequence, models);
        const auto sim = simulate(plan, c.parameters, sc.order.lot_size, {true});
        std::ostringstream os;
        write_trace_csv(os, sim);
        write_atomically(dir / ("rank_" + std::to_string(i + 1) + ".csv"), os.str());
      }
    }

    say("status: " + to_string(res.status));
    return res.status == RunStatus::no_feasible ? exit_code::infeasible : exit_code::ok;
  } catch (const std::exception& e) {
    say(std::string("internal error: ") + e.what());
    return exit_code::internal;
  }
}

}  // namespace reconfig
