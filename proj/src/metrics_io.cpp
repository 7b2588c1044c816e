#include "istn/metrics_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <toml.hpp>

namespace istn {

namespace {

struct MeanErr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanErr mean_stderr(const std::vector<double>& xs) {
  MeanErr r;
  if (xs.empty()) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1)) / std::sqrt(static_cast<double>(xs.size()));
  return r;
}

// Keeps free text in one CSV field.
std::string clean_field(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  }
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number: " + s);
  return v;
}

template <typename T>
T parse_int(const std::string& s) {
  std::size_t used = 0;
  const long long v = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad integer: " + s);
  return static_cast<T>(v);
}

template <typename T>
std::vector<T> number_list(const toml::table& root, const char* key) {
  const toml::array* arr = root[key].as_array();
  if (!arr) throw ConfigError(std::string(key) + ": expected an array");
  std::vector<T> out;
  for (const auto& node : *arr) {
    if constexpr (std::is_floating_point_v<T>) {
      auto v = node.value<double>();
      if (!v) throw ConfigError(std::string(key) + ": expected numbers");
      out.push_back(*v);
    } else {
      auto v = node.value<std::int64_t>();
      if (!v || *v < 0) throw ConfigError(std::string(key) + ": expected non-negative integers");
      out.push_back(static_cast<T>(*v));
    }
  }
  return out;
}

const char* const kRunsHeader =
    "value,seed,algo,slots,sum_rate_bps,sum_rate_stderr,backhaul_capacity_bps,backhaul_stderr,geo_gs_cinr_db_min,"
    "handover_count,dual_value,converged_fraction,violation_slots,unserved_gu,error";

} // namespace

std::optional<SweepVariable> parse_sweep_variable(const std::string& name) {
  if (name == "D_GU") return SweepVariable::GuCount;
  if (name == "H") return SweepVariable::HandoverThreshold;
  if (name == "CINR_th") return SweepVariable::CinrThreshold;
  if (name == "N_r") return SweepVariable::Connections;
  if (name == "constellation_size") return SweepVariable::ConstellationSize;
  if (name == "U_back") return SweepVariable::BackhaulDemand;
  return std::nullopt;
}

std::string sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::GuCount: return "D_GU";
    case SweepVariable::HandoverThreshold: return "H";
    case SweepVariable::CinrThreshold: return "CINR_th";
    case SweepVariable::Connections: return "N_r";
    case SweepVariable::ConstellationSize: return "constellation_size";
    case SweepVariable::BackhaulDemand: return "U_back";
  }
  return "?";
}

void apply_sweep_value(Scenario& sc, SweepVariable v, double value) {
  auto whole = [&](const char* what) {
    if (value != std::floor(value) || value < 0.0) {
      throw ConfigError(std::string(what) + ": sweep value must be a non-negative integer");
    }
    return static_cast<int>(value);
  };
  switch (v) {
    case SweepVariable::GuCount: {
      // density in GUs per square metre
      if (!(value >= 0.0)) throw ConfigError("D_GU: sweep value must be non-negative");
      sc.n_gu = static_cast<int>(std::lround(value * sc.area_side_m * sc.area_side_m));
      break;
    }
    case SweepVariable::HandoverThreshold: sc.handover_threshold_db = value; break;
    case SweepVariable::CinrThreshold: sc.cinr_threshold_db = value; break;
    case SweepVariable::Connections: sc.n_connect = whole("N_r"); break;
    case SweepVariable::ConstellationSize: {
      const int total = whole("constellation_size");
      const int planes = sc.constellation.planes;
      if (planes <= 0 || total % planes != 0) {
        throw ConfigError("constellation_size: " + std::to_string(total) + " is not a multiple of " +
                          std::to_string(planes) + " planes");
      }
      sc.constellation.sats_per_plane = total / planes;
      break;
    }
    case SweepVariable::BackhaulDemand: sc.caching.u_back_bps = value; break;
  }
}

void SweepSpec::validate() const {
  if (values.empty()) throw ConfigError("values: must not be empty");
  if (seeds.empty()) throw ConfigError("seeds: must not be empty");
  if (algos.empty()) throw ConfigError("algos: must not be empty");
  if (jobs < 1) throw ConfigError("jobs: must be >= 1");
}

SweepSpec sweep_spec_from_toml(const std::string& text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "parse error at line " << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
  for (const auto& [k, v] : root) {
    static const char* const known[] = {"variable", "values", "seeds", "algos", "jobs",
                                        "ideal_backhaul", "timeslots", "scenario"};
    if (std::find(std::begin(known), std::end(known), k.str()) == std::end(known)) {
      throw ConfigError(std::string(k.str()) + ": unknown sweep key");
    }
  }

  SweepSpec spec;
  const auto var = root["variable"].value<std::string>();
  if (!var) throw ConfigError("variable: required string");
  const auto parsed = parse_sweep_variable(*var);
  if (!parsed) throw ConfigError("variable: unknown sweep variable \"" + *var + "\"");
  spec.variable = *parsed;
  spec.values = number_list<double>(root, "values");
  spec.seeds = number_list<std::uint64_t>(root, "seeds");

  const toml::array* algos = root["algos"].as_array();
  if (!algos) throw ConfigError("algos: expected an array");
  for (const auto& node : *algos) {
    auto name = node.value<std::string>();
    if (!name) throw ConfigError("algos: expected strings");
    auto id = parse_algorithm(*name);
    if (!id) throw ConfigError("algos: unknown algorithm \"" + *name + "\"");
    spec.algos.push_back(*id);
  }

  if (root.contains("jobs")) {
    auto j = root["jobs"].value<std::int64_t>();
    if (!j) throw ConfigError("jobs: expected an integer");
    spec.jobs = static_cast<int>(*j);
  }
  if (root.contains("ideal_backhaul")) {
    auto b = root["ideal_backhaul"].value<bool>();
    if (!b) throw ConfigError("ideal_backhaul: expected a boolean");
    spec.ideal_backhaul = *b;
  }

  const toml::node* scen = root.get("scenario");
  if (!scen) {
    spec.base = Scenario{};
  } else if (auto path = scen->value<std::string>()) {
    std::filesystem::path p(*path);
    if (p.is_relative()) p = base_dir / p;
    spec.base = load_scenario(p);
  } else if (const toml::table* inline_table = scen->as_table()) {
    std::ostringstream os;
    os << *inline_table;
    spec.base = scenario_from_toml(os.str());
  } else {
    throw ConfigError("scenario: expected a path or a table");
  }

  if (root.contains("timeslots")) {
    auto t = root["timeslots"].value<std::int64_t>();
    if (!t) throw ConfigError("timeslots: expected an integer");
    spec.base.n_timeslots = static_cast<int>(*t);
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep spec " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return sweep_spec_from_toml(buf.str(), path.parent_path());
}

RunRow reduce_run(double value, std::uint64_t seed, AlgorithmId algo, const RunResult& r) {
  RunRow row;
  row.value = value;
  row.seed = seed;
  row.algo = algorithm_name(algo);
  row.slots = static_cast<int>(r.slots.size());
  if (r.slots.empty()) return row;
  std::vector<double> rate, bh;
  double dual = 0.0, unserved = 0.0;
  int converged = 0;
  row.geo_gs_cinr_db_min = INFINITY;
  for (const auto& m : r.slots) {
    rate.push_back(m.sum_rate_bps);
    bh.push_back(m.backhaul_total_bps);
    row.geo_gs_cinr_db_min = std::min(row.geo_gs_cinr_db_min, m.geo_gs_cinr_db_min);
    row.handover_count += m.handover_count;
    dual += m.dual_value;
    unserved += m.unserved_gu_count;
    converged += m.converged ? 1 : 0;
    row.violation_slots += m.enforced_ok ? 0 : 1;
  }
  const double n = static_cast<double>(r.slots.size());
  const auto rs = mean_stderr(rate);
  const auto bs = mean_stderr(bh);
  row.sum_rate_bps = rs.mean;
  row.sum_rate_stderr = rs.stderr_;
  row.backhaul_capacity_bps = bs.mean;
  row.backhaul_stderr = bs.stderr_;
  row.dual_value = dual / n;
  row.unserved_gu = unserved / n;
  row.converged_fraction = converged / n;
  return row;
}

std::vector<SummaryRow> summarize(const std::vector<RunRow>& runs) {
  // first-seen order of (value, algo) keeps the output tied to the spec order
  std::vector<std::pair<double, std::string>> keys;
  std::map<std::pair<double, std::string>, std::vector<const RunRow*>> groups;
  for (const auto& r : runs) {
    const auto key = std::make_pair(r.value, r.algo);
    if (!groups.count(key)) keys.push_back(key);
    groups[key].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (const auto& key : keys) {
    SummaryRow s;
    s.value = key.first;
    s.algo = key.second;
    std::vector<double> rate, bh, ho, cinr;
    for (const RunRow* r : groups[key]) {
      ++s.runs;
      if (!r->ok()) {
        ++s.failed;
        continue;
      }
      rate.push_back(r->sum_rate_bps);
      bh.push_back(r->backhaul_capacity_bps);
      ho.push_back(static_cast<double>(r->handover_count));
      cinr.push_back(r->geo_gs_cinr_db_min);
    }
    auto set = [](const std::vector<double>& xs, double& mean, double& se) {
      const auto m = mean_stderr(xs);
      mean = m.mean;
      se = m.stderr_;
    };
    set(rate, s.sum_rate_mean, s.sum_rate_stderr);
    set(bh, s.backhaul_mean, s.backhaul_stderr);
    set(ho, s.handover_mean, s.handover_stderr);
    set(cinr, s.cinr_min_mean, s.cinr_min_stderr);
    out.push_back(std::move(s));
  }
  return out;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  struct Cell {
    double value;
    std::uint64_t seed;
    AlgorithmId algo;
  };
  std::vector<Cell> cells;
  for (double v : spec.values) {
    for (auto seed : spec.seeds) {
      for (auto algo : spec.algos) cells.push_back({v, seed, algo});
    }
  }

  SweepResult res;
  res.variable = spec.variable;
  res.runs.resize(cells.size());
  std::vector<char> violated(cells.size(), 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& c = cells[i];
      try {
        Scenario sc = spec.base;
        sc.rng_seed = c.seed;
        apply_sweep_value(sc, spec.variable, c.value);
        RunOptions opt;
        opt.algo = c.algo;
        opt.ideal_backhaul = spec.ideal_backhaul;
        const RunResult r = run_simulation(sc, opt);
        res.runs[i] = reduce_run(c.value, c.seed, c.algo, r);
        violated[i] = r.enforces_c9 && r.constraint_violation;
      } catch (const std::exception& e) {
        RunRow row;
        row.value = c.value;
        row.seed = c.seed;
        row.algo = algorithm_name(c.algo);
        row.error = clean_field(e.what());
        if (row.error.empty()) row.error = "error";
        res.runs[i] = std::move(row);
      }
    }
  };

  const int threads = std::max(1, std::min<int>(spec.jobs, static_cast<int>(cells.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  res.constraint_violation = std::any_of(violated.begin(), violated.end(), [](char v) { return v != 0; });
  res.summary = summarize(res.runs);
  return res;
}

std::string runs_csv(const std::vector<RunRow>& runs) {
  std::ostringstream os;
  os << kSweepVersion << '\n' << kRunsHeader << '\n';
  for (const auto& r : runs) {
    os << format_number(r.value) << ',' << r.seed << ',' << r.algo << ',' << r.slots << ','
       << format_number(r.sum_rate_bps) << ',' << format_number(r.sum_rate_stderr) << ','
       << format_number(r.backhaul_capacity_bps) << ',' << format_number(r.backhaul_stderr) << ','
       << format_number(r.geo_gs_cinr_db_min) << ',' << r.handover_count << ',' << format_number(r.dual_value) << ','
       << format_number(r.converged_fraction) << ',' << r.violation_slots << ',' << format_number(r.unserved_gu)
       << ',' << clean_field(r.error) << '\n';
  }
  return os.str();
}

std::vector<RunRow> parse_runs_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepVersion) {
    throw std::invalid_argument("runs csv: missing version line \"" + std::string(kSweepVersion) + "\"");
  }
  if (!std::getline(in, line) || line != kRunsHeader) throw std::invalid_argument("runs csv: unexpected header");
  std::vector<RunRow> out;
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    const auto f = split(line);
    if (f.size() != 15) {
      throw std::invalid_argument("runs csv line " + std::to_string(lineno) + ": expected 15 fields");
    }
    try {
      RunRow r;
      r.value = parse_double(f[0]);
      r.seed = parse_int<std::uint64_t>(f[1]);
      r.algo = f[2];
      r.slots = parse_int<int>(f[3]);
      r.sum_rate_bps = parse_double(f[4]);
      r.sum_rate_stderr = parse_double(f[5]);
      r.backhaul_capacity_bps = parse_double(f[6]);
      r.backhaul_stderr = parse_double(f[7]);
      r.geo_gs_cinr_db_min = parse_double(f[8]);
      r.handover_count = parse_int<long>(f[9]);
      r.dual_value = parse_double(f[10]);
      r.converged_fraction = parse_double(f[11]);
      r.violation_slots = parse_int<int>(f[12]);
      r.unserved_gu = parse_double(f[13]);
      r.error = f[14];
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::invalid_argument("runs csv line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << kSweepVersion << '\n'
     << "value,algo,runs,failed,sum_rate_mean,sum_rate_stderr,backhaul_mean,backhaul_stderr,handover_mean,"
        "handover_stderr,cinr_min_mean,cinr_min_stderr\n";
  for (const auto& s : rows) {
    os << format_number(s.value) << ',' << s.algo << ',' << s.runs << ',' << s.failed << ','
       << format_number(s.sum_rate_mean) << ',' << format_number(s.sum_rate_stderr) << ','
       << format_number(s.backhaul_mean) << ',' << format_number(s.backhaul_stderr) << ','
       << format_number(s.handover_mean) << ',' << format_number(s.handover_stderr) << ','
       << format_number(s.cinr_min_mean) << ',' << format_number(s.cinr_min_stderr) << '\n';
  }
  return os.str();
}

std::string sweep_json(const SweepResult& r) {
  using json = nlohmann::ordered_json;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(format_number(v)); };
  json by_algo = json::object();
  for (const auto& s : r.summary) {
    json cell;
    cell["value"] = num(s.value);
    cell["runs"] = s.runs;
    cell["failed"] = s.failed;
    cell["sum_rate_bps"] = {{"mean", num(s.sum_rate_mean)}, {"stderr", num(s.sum_rate_stderr)}};
    cell["backhaul_capacity_bps"] = {{"mean", num(s.backhaul_mean)}, {"stderr", num(s.backhaul_stderr)}};
    cell["handover_count"] = {{"mean", num(s.handover_mean)}, {"stderr", num(s.handover_stderr)}};
    cell["geo_gs_cinr_db_min"] = {{"mean", num(s.cinr_min_mean)}, {"stderr", num(s.cinr_min_stderr)}};
    by_algo[s.algo].push_back(std::move(cell));
  }
  json root;
  root["version"] = 1;
  root[sweep_variable_name(r.variable)] = std::move(by_algo);
  return root.dump(2) + "\n";
}

std::string plotdata(const SweepResult& r, const std::string& metric) {
  auto pick = [&](const SummaryRow& s) -> std::pair<double, double> {
    if (metric == "sum_rate") return {s.sum_rate_mean, s.sum_rate_stderr};
    if (metric == "backhaul") return {s.backhaul_mean, s.backhaul_stderr};
    if (metric == "handover") return {s.handover_mean, s.handover_stderr};
    if (metric == "cinr_min") return {s.cinr_min_mean, s.cinr_min_stderr};
    throw std::invalid_argument("plotdata: unknown metric " + metric);
  };
  std::vector<std::string> order;
  for (const auto& s : r.summary) {
    if (std::find(order.begin(), order.end(), s.algo) == order.end()) order.push_back(s.algo);
  }
  std::ostringstream os;
  os << kSweepVersion << '\n';
  bool first = true;
  for (const auto& algo : order) {
    if (!first) os << "\n\n";
    first = false;
    os << "# algo=" << algo << " metric=" << metric << " x=" << sweep_variable_name(r.variable) << '\n';
    os << "# x y err\n";
    for (const auto& s : r.summary) {
      if (s.algo != algo) continue;
      const auto [y, e] = pick(s);
      os << format_number(s.value) << ' ' << format_number(y) << ' ' << format_number(e) << '\n';
    }
  }
  return os.str();
}

std::vector<std::filesystem::path> emit(const SweepResult& r, EmitFormat fmt, const std::filesystem::path& dir) {
  if (r.runs.empty()) throw std::invalid_argument("emit: no results");
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  switch (fmt) {
    case EmitFormat::Csv:
      files.emplace_back(dir / "runs.csv", runs_csv(r.runs));
      files.emplace_back(dir / "summary.csv", summary_csv(r.summary));
      break;
    case EmitFormat::Json: files.emplace_back(dir / "summary.json", sweep_json(r)); break;
    case EmitFormat::Plotdata:
      for (const char* m : {"sum_rate", "backhaul", "handover", "cinr_min"}) {
        files.emplace_back(dir / (std::string("plot_") + m + ".dat"), plotdata(r, m));
      }
      break;
  }
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [path, text] : files) {
    write_file(path, text);
    written.push_back(path);
  }
  return written;
}

} // namespace istn
