#include "reconfig/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace reconfig {

using nlohmann::json;

namespace {

struct FormatError : std::runtime_error {
  FormatError(std::string p, const std::string& msg) : std::runtime_error(msg), path(std::move(p)) {}
  std::string path;
};

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

std::string at_index(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

// Reads typed values out of the document and records unknown keys.
class Reader {
public:
  Reader(ValidationReport& report, bool lenient) : report_(report), lenient_(lenient) {}

  void allow(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) throw FormatError(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : keys) known = known || it.key() == k;
      if (known) continue;
      const std::string p = join(path, it.key());
      if (lenient_)
        report_.warn(p, "unknown key ignored");
      else
        report_.error(p, "unknown key");
    }
  }

  static const json& req(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw FormatError(join(path, key), "missing required key");
    return obj.at(key);
  }

  static double number(const json& j, const std::string& path) {
    if (!j.is_number()) throw FormatError(path, "expected a number");
    return j.get<double>();
  }

  static std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) throw FormatError(path, "expected a string");
    return j.get<std::string>();
  }

  static std::uint64_t unsigned_int(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0))
      throw FormatError(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
  }

  static long integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw FormatError(path, "expected an integer");
    return j.get<long>();
  }

  static const json& array(const json& j, const std::string& path) {
    if (!j.is_array()) throw FormatError(path, "expected an array");
    return j;
  }

  static std::vector<double> numbers(const json& j, const std::string& path) {
    std::vector<double> out;
    const auto& a = array(j, path);
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(number(a[i], at_index(path, i)));
    return out;
  }

  static std::vector<std::size_t> indices(const json& j, const std::string& path) {
    std::vector<std::size_t> out;
    const auto& a = array(j, path);
    for (std::size_t i = 0; i < a.size(); ++i)
      out.push_back(static_cast<std::size_t>(unsigned_int(a[i], at_index(path, i))));
    return out;
  }

  static Matrix matrix(const json& j, const std::string& path) {
    Matrix out;
    const auto& a = array(j, path);
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(numbers(a[i], at_index(path, i)));
    return out;
  }

  static Interval interval(const json& j, const std::string& path) {
    if (j.is_number()) return Interval::exact(j.get<double>());
    if (j.is_array() && j.size() == 2) return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
    throw FormatError(path, "expected a number or a [lo, hi] pair");
  }

  static StateDescription state(const json& j, const std::string& path) {
    if (!j.is_object()) throw FormatError(path, "expected an object of properties");
    StateDescription s;
    for (auto it = j.begin(); it != j.end(); ++it) s.set(it.key(), interval(it.value(), join(path, it.key())));
    return s;
  }

  EffortVector effort(const json& j, const std::string& path) {
    allow(j, path, {"time", "energy", "cost"});
    EffortVector e;
    for (Criterion z : kCriteria) {
      const char* key = to_string(z).data();
      if (j.contains(key)) e[z] = number(j.at(key), join(path, key));
    }
    return e;
  }

  ScalarMap scalar_map(const json& j, const std::string& path) {
    allow(j, path, {"coef", "offset"});
    ScalarMap m;
    if (j.contains("coef")) m.coef = number(j.at("coef"), join(path, "coef"));
    if (j.contains("offset")) m.offset = number(j.at("offset"), join(path, "offset"));
    return m;
  }

private:
  ValidationReport& report_;
  bool lenient_;
};

// ------------------------------------------------------------------ parsing

ProcessOperator parse_operator(Reader& r, const json& j, const std::string& path) {
  r.allow(j, path, {"id", "input", "output", "parameters", "model", "duration"});
  ProcessOperator op;
  op.id = Reader::text(Reader::req(j, path, "id"), join(path, "id"));
  op.input = Reader::state(Reader::req(j, path, "input"), join(path, "input"));
  op.output = Reader::state(Reader::req(j, path, "output"), join(path, "output"));
  op.model_id = Reader::text(Reader::req(j, path, "model"), join(path, "model"));
  if (j.contains("parameters")) {
    const std::string pp = join(path, "parameters");
    const auto& a = Reader::array(j.at("parameters"), pp);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string p = at_index(pp, i);
      r.allow(a[i], p, {"name", "lo", "hi"});
      op.parameters.push_back({Reader::text(Reader::req(a[i], p, "name"), join(p, "name")),
                               Reader::number(Reader::req(a[i], p, "lo"), join(p, "lo")),
                               Reader::number(Reader::req(a[i], p, "hi"), join(p, "hi"))});
    }
  }
  if (j.contains("duration")) {
    const std::string p = join(path, "duration");
    const auto& d = j.at("duration");
    r.allow(d, p, {"base", "coefficients"});
    op.duration.base = Reader::number(Reader::req(d, p, "base"), join(p, "base"));
    if (d.contains("coefficients"))
      op.duration.coefficients = Reader::numbers(d.at("coefficients"), join(p, "coefficients"));
  }
  return op;
}

ModuleConfiguration parse_configuration(Reader& r, const json& j, const std::string& path) {
  r.allow(j, path, {"id", "operators", "standby", "standby_maps", "switch_efforts"});
  ModuleConfiguration c;
  c.id = Reader::text(Reader::req(j, path, "id"), join(path, "id"));
  if (j.contains("operators")) {
    const std::string p = join(path, "operators");
    const auto& a = Reader::array(j.at("operators"), p);
    for (std::size_t i = 0; i < a.size(); ++i) c.operators.push_back(parse_operator(r, a[i], at_index(p, i)));
  }
  if (j.contains("standby")) {
    const std::string p = join(path, "standby");
    const auto& s = j.at("standby");
    r.allow(s, p, {"energy", "cost"});
    if (s.contains("energy")) c.standby_energy = Reader::number(s.at("energy"), join(p, "energy"));
    if (s.contains("cost")) c.standby_cost = Reader::number(s.at("cost"), join(p, "cost"));
  }
  if (j.contains("standby_maps")) {
    const std::string p = join(path, "standby_maps");
    const auto& s = j.at("standby_maps");
    r.allow(s, p, {"energy", "cost"});
    if (s.contains("energy")) c.standby_energy_map = r.scalar_map(s.at("energy"), join(p, "energy"));
    if (s.contains("cost")) c.standby_cost_map = r.scalar_map(s.at("cost"), join(p, "cost"));
  }
  if (j.contains("switch_efforts")) {
    const std::string p = join(path, "switch_efforts");
    const auto& s = j.at("switch_efforts");
    if (!s.is_object()) throw FormatError(p, "expected an object keyed by source configuration");
    for (auto it = s.begin(); it != s.end(); ++it)
      c.switch_efforts[it.key()] = r.effort(it.value(), join(p, it.key()));
  }
  return c;
}

Cppm parse_module(Reader& r, const json& j, const std::string& path) {
  r.allow(j, path, {"id", "configurations", "current_configuration", "location"});
  Cppm m;
  m.id = Reader::text(Reader::req(j, path, "id"), join(path, "id"));
  m.current_configuration =
      Reader::text(Reader::req(j, path, "current_configuration"), join(path, "current_configuration"));
  if (j.contains("location") && !j.at("location").is_null())
    m.location = static_cast<int>(Reader::integer(j.at("location"), join(path, "location")));
  const std::string p = join(path, "configurations");
  const auto& a = Reader::array(Reader::req(j, path, "configurations"), p);
  for (std::size_t i = 0; i < a.size(); ++i) m.configurations.push_back(parse_configuration(r, a[i], at_index(p, i)));
  return m;
}

LayoutGraph parse_layout(Reader& r, const json& j, const std::string& path) {
  r.allow(j, path, {"locations", "edges"});
  LayoutGraph g;
  const std::string lp = join(path, "locations");
  const auto& locs = Reader::array(Reader::req(j, path, "locations"), lp);
  for (std::size_t i = 0; i < locs.size(); ++i)
    g.locations.push_back(static_cast<int>(Reader::integer(locs[i], at_index(lp, i))));
  if (j.contains("edges")) {
    const std::string ep = join(path, "edges");
    const auto& edges = Reader::array(j.at("edges"), ep);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string p = at_index(ep, i);
      r.allow(edges[i], p, {"a", "b", "effort"});
      TransportEdge e;
      e.a = static_cast<int>(Reader::integer(Reader::req(edges[i], p, "a"), join(p, "a")));
      e.b = static_cast<int>(Reader::integer(Reader::req(edges[i], p, "b"), join(p, "b")));
      if (edges[i].contains("effort")) e.effort = r.effort(edges[i].at("effort"), join(p, "effort"));
      g.edges.push_back(e);
    }
  }
  return g;
}

ProductionOrder parse_order(Reader& r, const json& j, const std::string& path, ValidationReport& report) {
  r.allow(j, path, {"input", "output", "lot_size", "weights"});
  ProductionOrder o;
  o.input = Reader::state(Reader::req(j, path, "input"), join(path, "input"));
  o.output = Reader::state(Reader::req(j, path, "output"), join(path, "output"));
  o.lot_size = static_cast<int>(Reader::integer(Reader::req(j, path, "lot_size"), join(path, "lot_size")));
  const std::string wp = join(path, "weights");
  const auto& w = Reader::req(j, path, "weights");
  r.allow(w, wp, {"time", "energy", "cost"});
  std::array<double, 3> v{};
  for (Criterion z : kCriteria) {
    const char* key = to_string(z).data();
    v[index_of(z)] = Reader::number(Reader::req(w, wp, key), join(wp, key));
  }
  if (auto err = CriteriaWeights::check(v[0], v[1], v[2]))
    report.error(wp, *err);
  else
    o.weights = CriteriaWeights(v[0], v[1], v[2]);
  return o;
}

DisturbanceKind parse_kind(const json& j, const std::string& path) {
  const auto s = Reader::text(j, path);
  if (s == "none") return DisturbanceKind::none;
  if (s == "step") return DisturbanceKind::step;
  if (s == "drift") return DisturbanceKind::drift;
  if (s == "periodic") return DisturbanceKind::periodic;
  throw FormatError(path, "unknown disturbance kind '" + s + "'");
}

CriterionSubsets parse_subsets(Reader& r, const json& j, const std::string& path) {
  r.allow(j, path, {"excluded_outputs", "excluded_output_lags", "excluded_actuations",
                    "excluded_actuation_lags", "excluded_coupling", "effort_map"});
  CriterionSubsets c;
  auto idx = [&](const char* key, std::vector<std::size_t>& dst) {
    if (j.contains(key)) dst = Reader::indices(j.at(key), join(path, key));
  };
  idx("excluded_outputs", c.excluded_outputs);
  idx("excluded_output_lags", c.excluded_output_lags);
  idx("excluded_actuations", c.excluded_actuations);
  idx("excluded_actuation_lags", c.excluded_actuation_lags);
  idx("excluded_coupling", c.excluded_coupling);
  const std::string mp = join(path, "effort_map");
  const auto& m = Reader::req(j, path, "effort_map");
  r.allow(m, mp, {"coefficients", "offset"});
  c.effort_map.coefficients = Reader::numbers(Reader::req(m, mp, "coefficients"), join(mp, "coefficients"));
  if (m.contains("offset")) c.effort_map.offset = Reader::number(m.at("offset"), join(mp, "offset"));
  return c;
}

ProcessModelSpec parse_process_model(Reader& r, const json& j, const std::string& path) {
  r.allow(j, path, {"id", "shape", "criteria", "output_range", "seed", "plant", "anomaly", "excitation"});
  ProcessModelSpec s;
  s.id = Reader::text(Reader::req(j, path, "id"), join(path, "id"));
  if (j.contains("seed")) s.seed = Reader::unsigned_int(j.at("seed"), join(path, "seed"));

  const std::string sp = join(path, "shape");
  const auto& sh = Reader::req(j, path, "shape");
  r.allow(sh, sp, {"outputs", "actuations", "output_lags", "actuation_lags", "coupling", "horizon", "hidden"});
  auto dim = [&](const char* key, std::size_t& dst) {
    if (sh.contains(key)) dst = static_cast<std::size_t>(Reader::unsigned_int(sh.at(key), join(sp, key)));
  };
  dim("outputs", s.shape.outputs);
  dim("actuations", s.shape.actuations);
  dim("output_lags", s.shape.output_lags);
  dim("actuation_lags", s.shape.actuation_lags);
  dim("coupling", s.shape.coupling);
  if (sh.contains("horizon")) s.shape.horizon = Reader::number(sh.at("horizon"), join(sp, "horizon"));
  if (sh.contains("hidden")) s.shape.hidden = Reader::indices(sh.at("hidden"), join(sp, "hidden"));

  const std::string cp = join(path, "criteria");
  const auto& cr = Reader::req(j, path, "criteria");
  r.allow(cr, cp, {"time", "energy", "cost"});
  for (Criterion z : kCriteria) {
    const char* key = to_string(z).data();
    if (cr.contains(key)) {
      s.criteria[index_of(z)] = parse_subsets(r, cr.at(key), join(cp, key));
    } else {
      s.criteria[index_of(z)].effort_map.coefficients.assign(s.shape.outputs, 0.0);
    }
  }

  if (j.contains("output_range")) {
    const std::string p = join(path, "output_range");
    const auto& a = Reader::array(j.at("output_range"), p);
    for (std::size_t i = 0; i < a.size(); ++i) s.output_range.push_back(Reader::interval(a[i], at_index(p, i)));
  } else {
    s.output_range.assign(s.shape.outputs, Interval{0.0, 1e12});
  }

  const std::string pp = join(path, "plant");
  const auto& pl = Reader::req(j, path, "plant");
  r.allow(pl, pp, {"bias", "ar", "input", "coupling", "quadratic", "noise_std"});
  s.plant.outputs = s.shape.outputs;
  s.plant.actuations = s.shape.actuations;
  s.plant.coupling_dim = s.shape.coupling;
  s.plant.bias = Reader::numbers(Reader::req(pl, pp, "bias"), join(pp, "bias"));
  auto matrices = [&](const char* key, std::vector<Matrix>& dst) {
    if (!pl.contains(key)) return;
    const std::string p = join(pp, key);
    const auto& a = Reader::array(pl.at(key), p);
    for (std::size_t i = 0; i < a.size(); ++i) dst.push_back(Reader::matrix(a[i], at_index(p, i)));
  };
  matrices("ar", s.plant.ar);
  matrices("input", s.plant.input);
  if (pl.contains("coupling")) s.plant.coupling = Reader::matrix(pl.at("coupling"), join(pp, "coupling"));
  if (pl.contains("quadratic")) s.plant.quadratic = Reader::matrix(pl.at("quadratic"), join(pp, "quadratic"));
  if (pl.contains("noise_std")) s.noise_std = Reader::number(pl.at("noise_std"), join(pp, "noise_std"));

  if (j.contains("anomaly")) {
    const std::string p = join(path, "anomaly");
    const auto& a = j.at("anomaly");
    r.allow(a, p, {"kind", "magnitude", "onset", "period", "channels"});
    s.anomaly.kind = parse_kind(Reader::req(a, p, "kind"), join(p, "kind"));
    if (a.contains("magnitude")) s.anomaly.magnitude = Reader::number(a.at("magnitude"), join(p, "magnitude"));
    if (a.contains("onset")) s.anomaly.onset = Reader::integer(a.at("onset"), join(p, "onset"));
    if (a.contains("period")) s.anomaly.period = Reader::number(a.at("period"), join(p, "period"));
    if (a.contains("channels")) s.anomaly.channels = Reader::indices(a.at("channels"), join(p, "channels"));
  }
  if (j.contains("excitation")) {
    const std::string p = join(path, "excitation");
    const auto& e = j.at("excitation");
    r.allow(e, p, {"coupling"});
    if (e.contains("coupling")) {
      const auto iv = Reader::interval(e.at("coupling"), join(p, "coupling"));
      s.coupling_lo = iv.lo;
      s.coupling_hi = iv.hi;
    }
  }
  return s;
}

void parse_optimizer(Reader& r, const json& j, const std::string& path, Scenario& sc) {
  r.allow(j, path, {"strategy", "single_budget", "weighted_budget", "grid_points", "sample_fraction",
                    "initial_step", "search", "training"});
  auto& o = sc.optimizer;
  auto count = [&](const json& obj, const std::string& p, const char* key, std::size_t& dst) {
    if (obj.contains(key)) dst = static_cast<std::size_t>(Reader::unsigned_int(obj.at(key), join(p, key)));
  };
  if (j.contains("strategy")) o.strategy = Reader::text(j.at("strategy"), join(path, "strategy"));
  count(j, path, "single_budget", o.single_budget);
  count(j, path, "weighted_budget", o.weighted_budget);
  count(j, path, "grid_points", o.grid_points);
  if (j.contains("sample_fraction"))
    o.sample_fraction = Reader::number(j.at("sample_fraction"), join(path, "sample_fraction"));
  if (j.contains("initial_step")) o.initial_step = Reader::number(j.at("initial_step"), join(path, "initial_step"));
  if (j.contains("search")) {
    const std::string p = join(path, "search");
    const auto& s = j.at("search");
    r.allow(s, p, {"max_depth", "max_branches"});
    count(s, p, "max_depth", sc.search.max_depth);
    count(s, p, "max_branches", sc.search.max_branches);
  }
  if (j.contains("training")) {
    const std::string p = join(path, "training");
    const auto& t = j.at("training");
    r.allow(t, p, {"learning_rate", "epochs", "batch_size", "bootstrap_cycles"});
    if (t.contains("learning_rate"))
      sc.training.learning_rate = Reader::number(t.at("learning_rate"), join(p, "learning_rate"));
    count(t, p, "epochs", sc.training.epochs);
    count(t, p, "batch_size", sc.training.batch_size);
    count(t, p, "bootstrap_cycles", sc.training.bootstrap_cycles);
  }
}

// --------------------------------------------------------------- validation

void check_state(ValidationReport& rep, const StateDescription& s, const std::string& path) {
  for (const auto& [name, iv] : s.properties())
    if (!iv.is_valid()) rep.error(join(path, name), "malformed interval: lo > hi");
}

void check_effort(ValidationReport& rep, const EffortVector& e, const std::string& path) {
  if (!e.is_valid()) rep.error(path, "efforts must be finite and non-negative");
}

template <class T, class Id>
void check_unique(ValidationReport& rep, const std::vector<T>& items, Id id_of, const std::string& path,
                  const char* what) {
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string id = id_of(items[i]);
    if (id.empty()) rep.error(join(at_index(path, i), "id"), std::string("empty ") + what + " id");
    if (id.find("__") != std::string::npos || id.find_first_of("/\\") != std::string::npos)
      rep.error(join(at_index(path, i), "id"), std::string(what) + " id must not contain '__' or path separators");
    if (!seen.insert(id).second)
      rep.error(join(at_index(path, i), "id"), std::string("duplicate ") + what + " id '" + id + "'");
  }
}

double affine_minimum(const AffineMap& g, const std::vector<Interval>& box) {
  double v = g.offset;
  for (std::size_t i = 0; i < g.coefficients.size() && i < box.size(); ++i)
    v += g.coefficients[i] * (g.coefficients[i] >= 0.0 ? box[i].lo : box[i].hi);
  return v;
}

void validate_process_model(ValidationReport& rep, const ProcessModelSpec& s, const std::string& path) {
  try {
    instantiate_model(s, s.id, s.seed).check();
  } catch (const ReconfigError& e) {
    rep.error(path, e.what());
    return;
  }
  for (Criterion z : {Criterion::energy, Criterion::cost}) {
    const auto& c = s.criteria[index_of(z)];
    std::vector<Interval> box;
    for (std::size_t i = 0; i < s.shape.outputs; ++i)
      if (std::find(c.excluded_outputs.begin(), c.excluded_outputs.end(), i) == c.excluded_outputs.end())
        box.push_back(s.output_range[i]);
    if (affine_minimum(c.effort_map, box) < 0.0)
      rep.error(join(join(join(path, "criteria"), std::string(to_string(z))), "effort_map"),
                "effort map can be negative over the output range");
  }
  PlantSpec plant = plant_of(s, true, 0);
  try {
    plant.check();
  } catch (const ReconfigError& e) {
    rep.error(join(path, "plant"), e.what());
  }
  if (s.coupling_lo > s.coupling_hi) rep.error(join(path, "excitation.coupling"), "malformed interval: lo > hi");
}

}  // namespace

// ----------------------------------------------------------------- public

const ProcessModelSpec* Scenario::find_process_model(std::string_view id) const {
  for (const auto& p : process_models)
    if (p.id == id) return &p;
  return nullptr;
}

bool ValidationReport::ok() const {
  return std::none_of(issues.begin(), issues.end(), [](const ValidationIssue& i) { return !i.warning; });
}

void ValidationReport::error(std::string path, std::string message) {
  issues.push_back({std::move(path), std::move(message), false});
}

void ValidationReport::warn(std::string path, std::string message) {
  issues.push_back({std::move(path), std::move(message), true});
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& i : issues)
    os << (i.warning ? "warning: " : "error: ") << (i.path.empty() ? "<root>" : i.path) << ": " << i.message
       << "\n";
  return os.str();
}

ValidationReport validate_scenario(const Scenario& sc) {
  ValidationReport rep;
  const auto& sys = sc.system;

  check_unique(rep, sys.modules, [](const Cppm& m) { return m.id; }, "modules", "module");
  check_unique(rep, sc.process_models, [](const ProcessModelSpec& p) { return p.id; }, "process_models",
               "process model");

  std::set<int> locs;
  for (std::size_t i = 0; i < sys.layout.locations.size(); ++i)
    if (!locs.insert(sys.layout.locations[i]).second)
      rep.error(at_index("layout.locations", i), "duplicate location " + std::to_string(sys.layout.locations[i]));
  std::set<std::pair<int, int>> edge_keys;
  for (std::size_t i = 0; i < sys.layout.edges.size(); ++i) {
    const auto& e = sys.layout.edges[i];
    const std::string p = at_index("layout.edges", i);
    if (!locs.count(e.a) || !locs.count(e.b)) rep.error(p, "edge endpoint is not a location");
    if (e.a == e.b) rep.error(p, "self-loop edge");
    if (!edge_keys.insert({std::min(e.a, e.b), std::max(e.a, e.b)}).second) rep.error(p, "duplicate edge");
    check_effort(rep, e.effort, join(p, "effort"));
  }

  std::map<int, std::string> placed;
  for (std::size_t mi = 0; mi < sys.modules.size(); ++mi) {
    const auto& m = sys.modules[mi];
    const std::string mp = at_index("modules", mi);
    if (m.location) {
      if (!locs.count(*m.location))
        rep.error(join(mp, "location"), "unknown location " + std::to_string(*m.location));
      else if (!placed.emplace(*m.location, m.id).second)
        rep.error(join(mp, "location"), "location " + std::to_string(*m.location) + " already holds module " +
                                            placed[*m.location]);
    }
    check_unique(rep, m.configurations, [](const ModuleConfiguration& c) { return c.id; },
                 join(mp, "configurations"), "configuration");
    if (!m.find_configuration(m.current_configuration))
      rep.error(join(mp, "current_configuration"),
                "unknown configuration '" + m.current_configuration + "'");
    for (std::size_t ci = 0; ci < m.configurations.size(); ++ci) {
      const auto& c = m.configurations[ci];
      const std::string cp = at_index(join(mp, "configurations"), ci);
      if (!(c.standby_energy >= 0.0) || !(c.standby_cost >= 0.0))
        rep.error(join(cp, "standby"), "standby constants must be non-negative");
      if (c.standby_energy_map(c.standby_energy) < 0.0 || c.standby_cost_map(c.standby_cost) < 0.0)
        rep.error(join(cp, "standby_maps"), "standby effort per cycle is negative");
      for (const auto& [src, eff] : c.switch_efforts) {
        const std::string sp = join(join(cp, "switch_efforts"), src);
        if (!m.find_configuration(src)) rep.error(sp, "unknown source configuration '" + src + "'");
        if (src == c.id && !(eff == EffortVector::zero())) rep.error(sp, "switching to itself must cost nothing");
        check_effort(rep, eff, sp);
      }
      check_unique(rep, c.operators, [](const ProcessOperator& o) { return o.id; }, join(cp, "operators"),
                   "operator");
      for (std::size_t oi = 0; oi < c.operators.size(); ++oi) {
        const auto& op = c.operators[oi];
        const std::string op_path = at_index(join(cp, "operators"), oi);
        check_state(rep, op.input, join(op_path, "input"));
        check_state(rep, op.output, join(op_path, "output"));
        if (op.parameters.empty()) rep.error(join(op_path, "parameters"), "operator needs at least one parameter");
        for (std::size_t pi = 0; pi < op.parameters.size(); ++pi)
          if (!(op.parameters[pi].lo <= op.parameters[pi].hi))
            rep.error(at_index(join(op_path, "parameters"), pi), "parameter bound with lo > hi");
        if (!op.duration.coefficients.empty() && op.duration.coefficients.size() != op.parameters.size())
          rep.error(join(op_path, "duration.coefficients"), "one coefficient per parameter expected");
        else if (!(op.duration.minimum_over(op.parameters) > 0.0))
          rep.error(join(op_path, "duration"), "service duration must stay positive over the parameter box");
        const auto* pm = sc.find_process_model(op.model_id);
        if (!pm)
          rep.error(join(op_path, "model"), "unknown process model '" + op.model_id + "'");
        else if (pm->shape.actuations != op.parameters.size())
          rep.error(join(op_path, "model"), "process model '" + op.model_id + "' expects " +
                                                std::to_string(pm->shape.actuations) + " actuation channels");
      }
    }
  }

  check_state(rep, sc.order.input, "order.input");
  check_state(rep, sc.order.output, "order.output");
  if (sc.order.lot_size < 1) rep.error("order.lot_size", "lot size must be >= 1");
  {
    const auto& w = sc.order.weights.values();
    if (auto err = CriteriaWeights::check(w[0], w[1], w[2])) rep.error("order.weights", *err);
  }

  for (std::size_t i = 0; i < sc.process_models.size(); ++i)
    validate_process_model(rep, sc.process_models[i], at_index("process_models", i));

  const auto& o = sc.optimizer;
  if (o.strategy != "random_pattern" && o.strategy != "grid")
    rep.error("optimizer.strategy", "unknown strategy '" + o.strategy + "'");
  if (o.single_budget < 1 || o.weighted_budget < 1) rep.error("optimizer", "budgets must be >= 1");
  if (o.grid_points < 1) rep.error("optimizer.grid_points", "grid needs at least one point per parameter");
  if (!(o.sample_fraction > 0.0 && o.sample_fraction <= 1.0))
    rep.error("optimizer.sample_fraction", "must lie in (0, 1]");
  if (!(o.initial_step > 0.0)) rep.error("optimizer.initial_step", "must be positive");
  if (sc.search.max_depth < 1 || sc.search.max_branches < 1)
    rep.error("optimizer.search", "search limits must be >= 1");
  if (!(sc.training.learning_rate > 0.0)) rep.error("optimizer.training.learning_rate", "must be positive");
  if (sc.training.batch_size < 1) rep.error("optimizer.training.batch_size", "must be >= 1");
  if (sc.training.bootstrap_cycles < 2) rep.error("optimizer.training.bootstrap_cycles", "must be >= 2");
  return rep;
}

ScenarioLoad scenario_from_json(const json& doc, bool lenient) {
  ScenarioLoad out;
  Reader r(out.report, lenient);
  Scenario sc;
  try {
    r.allow(doc, "", {"modules", "layout", "order", "process_models", "optimizer", "seed"});
    const auto& mods = Reader::array(Reader::req(doc, "", "modules"), "modules");
    for (std::size_t i = 0; i < mods.size(); ++i) sc.system.modules.push_back(parse_module(r, mods[i], at_index("modules", i)));
    sc.system.layout = parse_layout(r, Reader::req(doc, "", "layout"), "layout");
    sc.order = parse_order(r, Reader::req(doc, "", "order"), "order", out.report);
    const auto& pms = Reader::array(Reader::req(doc, "", "process_models"), "process_models");
    for (std::size_t i = 0; i < pms.size(); ++i)
      sc.process_models.push_back(parse_process_model(r, pms[i], at_index("process_models", i)));
    if (doc.contains("optimizer")) parse_optimizer(r, doc.at("optimizer"), "optimizer", sc);
    sc.seed = Reader::unsigned_int(Reader::req(doc, "", "seed"), "seed");
  } catch (const FormatError& e) {
    out.report.error(e.path, e.what());
    return out;
  } catch (const json::exception& e) {
    out.report.error("", e.what());
    return out;
  }
  if (!out.report.ok()) return out;
  auto sem = validate_scenario(sc);
  out.report.issues.insert(out.report.issues.end(), sem.issues.begin(), sem.issues.end());
  if (out.report.ok()) out.scenario = std::move(sc);
  return out;
}

ScenarioLoad load_scenario(const std::filesystem::path& file, bool lenient) {
  std::ifstream in(file);
  if (!in) {
    ScenarioLoad out;
    out.report.error("", "cannot open " + file.string());
    return out;
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    ScenarioLoad out;
    out.report.error("", std::string("invalid JSON: ") + e.what());
    return out;
  }
  return scenario_from_json(doc, lenient);
}

// -------------------------------------------------------------- writing

namespace {

json interval_json(const Interval& iv) {
  if (iv.is_exact()) return iv.lo;
  return json::array({iv.lo, iv.hi});
}

json state_json(const StateDescription& s) {
  json j = json::object();
  for (const auto& [k, v] : s.properties()) j[k] = interval_json(v);
  return j;
}

json effort_json(const EffortVector& e) {
  return {{"time", e.time()}, {"energy", e.energy()}, {"cost", e.cost()}};
}

json subsets_json(const CriterionSubsets& c) {
  return {{"excluded_outputs", c.excluded_outputs},
          {"excluded_output_lags", c.excluded_output_lags},
          {"excluded_actuations", c.excluded_actuations},
          {"excluded_actuation_lags", c.excluded_actuation_lags},
          {"excluded_coupling", c.excluded_coupling},
          {"effort_map", {{"coefficients", c.effort_map.coefficients}, {"offset", c.effort_map.offset}}}};
}

json shape_json(const NarxShape& s) {
  return {{"outputs", s.outputs},         {"actuations", s.actuations}, {"output_lags", s.output_lags},
          {"actuation_lags", s.actuation_lags}, {"coupling", s.coupling},     {"horizon", s.horizon},
          {"hidden", s.hidden}};
}

json criteria_json(const std::array<CriterionSubsets, 3>& c) {
  json j = json::object();
  for (Criterion z : kCriteria) j[std::string(to_string(z))] = subsets_json(c[index_of(z)]);
  return j;
}

json ranges_json(const std::vector<Interval>& r) {
  json j = json::array();
  for (const auto& iv : r) j.push_back(json::array({iv.lo, iv.hi}));
  return j;
}

}  // namespace

std::string to_string(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::none: return "none";
    case DisturbanceKind::step: return "step";
    case DisturbanceKind::drift: return "drift";
    case DisturbanceKind::periodic: return "periodic";
  }
  return "none";
}

json scenario_to_json(const Scenario& sc) {
  json doc;
  json mods = json::array();
  for (const auto& m : sc.system.modules) {
    json jm{{"id", m.id}, {"current_configuration", m.current_configuration}};
    if (m.location) jm["location"] = *m.location;
    json cfgs = json::array();
    for (const auto& c : m.configurations) {
      json jc{{"id", c.id},
              {"standby", {{"energy", c.standby_energy}, {"cost", c.standby_cost}}},
              {"standby_maps",
               {{"energy", {{"coef", c.standby_energy_map.coef}, {"offset", c.standby_energy_map.offset}}},
                {"cost", {{"coef", c.standby_cost_map.coef}, {"offset", c.standby_cost_map.offset}}}}}};
      json sw = json::object();
      for (const auto& [src, e] : c.switch_efforts) sw[src] = effort_json(e);
      jc["switch_efforts"] = sw;
      json ops = json::array();
      for (const auto& op : c.operators) {
        json params = json::array();
        for (const auto& p : op.parameters) params.push_back({{"name", p.name}, {"lo", p.lo}, {"hi", p.hi}});
        ops.push_back({{"id", op.id},
                       {"input", state_json(op.input)},
                       {"output", state_json(op.output)},
                       {"parameters", params},
                       {"model", op.model_id},
                       {"duration", {{"base", op.duration.base}, {"coefficients", op.duration.coefficients}}}});
      }
      jc["operators"] = ops;
      cfgs.push_back(jc);
    }
    jm["configurations"] = cfgs;
    mods.push_back(jm);
  }
  doc["modules"] = mods;

  json edges = json::array();
  for (const auto& e : sc.system.layout.edges)
    edges.push_back({{"a", e.a}, {"b", e.b}, {"effort", effort_json(e.effort)}});
  doc["layout"] = {{"locations", sc.system.layout.locations}, {"edges", edges}};

  const auto& w = sc.order.weights.values();
  doc["order"] = {{"input", state_json(sc.order.input)},
                  {"output", state_json(sc.order.output)},
                  {"lot_size", sc.order.lot_size},
                  {"weights", {{"time", w[0]}, {"energy", w[1]}, {"cost", w[2]}}}};

  json pms = json::array();
  for (const auto& p : sc.process_models) {
    json plant{{"bias", p.plant.bias}, {"ar", p.plant.ar}, {"input", p.plant.input}, {"noise_std", p.noise_std}};
    if (!p.plant.coupling.empty()) plant["coupling"] = p.plant.coupling;
    if (!p.plant.quadratic.empty()) plant["quadratic"] = p.plant.quadratic;
    pms.push_back({{"id", p.id},
                   {"shape", shape_json(p.shape)},
                   {"criteria", criteria_json(p.criteria)},
                   {"output_range", ranges_json(p.output_range)},
                   {"seed", p.seed},
                   {"plant", plant},
                   {"anomaly",
                    {{"kind", to_string(p.anomaly.kind)},
                     {"magnitude", p.anomaly.magnitude},
                     {"onset", p.anomaly.onset},
                     {"period", p.anomaly.period},
                     {"channels", p.anomaly.channels}}},
                   {"excitation", {{"coupling", json::array({p.coupling_lo, p.coupling_hi})}}}});
  }
  doc["process_models"] = pms;

  const auto& o = sc.optimizer;
  doc["optimizer"] = {{"strategy", o.strategy},
                      {"single_budget", o.single_budget},
                      {"weighted_budget", o.weighted_budget},
                      {"grid_points", o.grid_points},
                      {"sample_fraction", o.sample_fraction},
                      {"initial_step", o.initial_step},
                      {"search", {{"max_depth", sc.search.max_depth}, {"max_branches", sc.search.max_branches}}},
                      {"training",
                       {{"learning_rate", sc.training.learning_rate},
                        {"epochs", sc.training.epochs},
                        {"batch_size", sc.training.batch_size},
                        {"bootstrap_cycles", sc.training.bootstrap_cycles}}}};
  doc["seed"] = sc.seed;
  return doc;
}

void save_scenario(const std::filesystem::path& file, const Scenario& sc) {
  std::ofstream out(file);
  if (!out) throw ReconfigError("cannot write " + file.string());
  out << scenario_to_json(sc).dump(2) << "\n";
}

NarxModel instantiate_model(const ProcessModelSpec& spec, std::string id, std::uint64_t seed) {
  NarxModel m = NarxModel::create(std::move(id), spec.shape, seed);
  m.criteria = spec.criteria;
  m.output_range = spec.output_range;
  return m;
}

PlantSpec plant_of(const ProcessModelSpec& spec, bool with_anomaly, std::uint64_t noise_seed) {
  PlantSpec p;
  p.dynamics = spec.plant;
  p.dynamics.outputs = spec.shape.outputs;
  p.dynamics.actuations = spec.shape.actuations;
  p.dynamics.coupling_dim = spec.shape.coupling;
  if (with_anomaly) p.disturbance = spec.anomaly;
  p.noise_std = spec.noise_std;
  p.seed = noise_seed;
  return p;
}

Excitation excitation_of(const ProcessModelSpec& spec, const ProcessOperator& op) {
  return {op.parameters, spec.coupling_lo, spec.coupling_hi};
}

// ------------------------------------------------------------ model files

namespace {

json mlp_json(const Mlp& net) {
  json layers = json::array();
  for (const auto& l : net.layers())
    layers.push_back({{"inputs", l.inputs}, {"outputs", l.outputs}, {"weights", l.weights}, {"bias", l.bias}});
  return {{"seed", net.seed()}, {"layers", layers}};
}

Mlp mlp_from(const json& j) {
  std::vector<DenseLayer> layers;
  for (const auto& l : j.at("layers")) {
    DenseLayer d;
    d.inputs = l.at("inputs").get<std::size_t>();
    d.outputs = l.at("outputs").get<std::size_t>();
    d.weights = l.at("weights").get<std::vector<double>>();
    d.bias = l.at("bias").get<std::vector<double>>();
    if (d.weights.size() != d.inputs * d.outputs || d.bias.size() != d.outputs)
      throw ReconfigError("model file: layer size mismatch");
    layers.push_back(std::move(d));
  }
  return Mlp::from_layers(std::move(layers), j.at("seed").get<std::uint64_t>());
}

json normalizer_json(const Normalizer& n) { return {{"shift", n.shift}, {"scale", n.scale}}; }

Normalizer normalizer_from(const json& j) {
  return {j.at("shift").get<std::vector<double>>(), j.at("scale").get<std::vector<double>>()};
}

constexpr int kModelFormat = 1;

}  // namespace

json model_to_json(const NarxModel& m) {
  return {{"format", kModelFormat},
          {"id", m.id},
          {"version", m.version},
          {"seed", m.seed},
          {"shape", shape_json(m.shape)},
          {"criteria", criteria_json(m.criteria)},
          {"output_range", ranges_json(m.output_range)},
          {"normalization_fitted", m.normalization_fitted},
          {"normalization",
           {{"process_in", normalizer_json(m.process_in)},
            {"process_out", normalizer_json(m.process_out)},
            {"disturbance_in", normalizer_json(m.disturbance_in)},
            {"disturbance_out", normalizer_json(m.disturbance_out)}}},
          {"recent_disturbances", m.recent_disturbances},
          {"process_net", mlp_json(m.process_net)},
          {"disturbance_net", mlp_json(m.disturbance_net)}};
}

NarxModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<int>() != kModelFormat) throw ReconfigError("model file: unsupported format");
    ValidationReport ignored;
    Reader r(ignored, true);
    NarxModel m;
    m.id = j.at("id").get<std::string>();
    m.version = j.at("version").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& sh = j.at("shape");
    m.shape.outputs = sh.at("outputs").get<std::size_t>();
    m.shape.actuations = sh.at("actuations").get<std::size_t>();
    m.shape.output_lags = sh.at("output_lags").get<std::size_t>();
    m.shape.actuation_lags = sh.at("actuation_lags").get<std::size_t>();
    m.shape.coupling = sh.at("coupling").get<std::size_t>();
    m.shape.horizon = sh.at("horizon").get<double>();
    m.shape.hidden = sh.at("hidden").get<std::vector<std::size_t>>();
    for (Criterion z : kCriteria) {
      const std::string key(to_string(z));
      m.criteria[index_of(z)] = parse_subsets(r, j.at("criteria").at(key), "criteria." + key);
    }
    for (const auto& iv : j.at("output_range")) m.output_range.push_back({iv.at(0).get<double>(), iv.at(1).get<double>()});
    m.normalization_fitted = j.at("normalization_fitted").get<bool>();
    const auto& n = j.at("normalization");
    m.process_in = normalizer_from(n.at("process_in"));
    m.process_out = normalizer_from(n.at("process_out"));
    m.disturbance_in = normalizer_from(n.at("disturbance_in"));
    m.disturbance_out = normalizer_from(n.at("disturbance_out"));
    m.recent_disturbances = j.at("recent_disturbances").get<std::vector<std::vector<double>>>();
    m.process_net = mlp_from(j.at("process_net"));
    m.disturbance_net = mlp_from(j.at("disturbance_net"));
    m.check();
    return m;
  } catch (const json::exception& e) {
    throw ReconfigError(std::string("model file: ") + e.what());
  } catch (const FormatError& e) {
    throw ReconfigError("model file: " + e.path + ": " + e.what());
  }
}

}  // namespace reconfig
