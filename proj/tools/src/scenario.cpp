#include "tiltcut_cli/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tiltcut/barriers.hpp"
#include "tiltcut/bounds.hpp"
#include "tiltcut/error.hpp"
#include "tiltcut/graph_io.hpp"
#include "tiltcut/rng.hpp"
#include "tiltcut/state_space.hpp"

namespace tiltcut::cli {

using json = nlohmann::ordered_json;

std::string to_string(Mode m) {
  switch (m) {
    case Mode::simulate: return "simulate";
    case Mode::exact: return "exact";
    case Mode::barriers: return "barriers";
    case Mode::bounds: return "bounds";
    case Mode::dichotomy: return "dichotomy";
  }
  return "unknown";
}

Mode parse_mode(const std::string& name) {
  for (Mode m : {Mode::simulate, Mode::exact, Mode::barriers, Mode::bounds, Mode::dichotomy}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown mode '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ValidationError("empty entry in list '" + value + "'");
    out.push_back(item);
  }
  return out;
}

double to_real(const std::string& key, const std::string& text) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("key '" + key + "': '" + text + "' is not a number");
  }
  return x;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long x = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("key '" + key + "': '" + text + "' is not an integer");
  }
  return x;
}

std::uint64_t to_seed(const std::string& key, const std::string& text) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ValidationError("key '" + key + "': '" + text + "' is not an unsigned 64-bit seed");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ValidationError("key '" + key + "': expected true or false");
}

std::string join_reals(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ",") + format_real(x);
  return out;
}

std::string real_or_empty(const std::optional<double>& x) {
  return x ? format_real(*x) : "";
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "mode", "family", "n", "n_side", "d", "K", "k", "r", "graph_seed", "graph_file",
      "h", "fields", "payoff", "kernel", "update", "beta", "trials", "max_sweeps", "seed",
      "out", "cap_exact_n", "workers", "random_starts", "sizes", "replicates", "h_chain",
      "h_regular", "regular_k", "L1", "L2", "C", "delta", "lambda", "b", "alpha", "gamma",
      "ell", "verify"};
  return keys;
}

/// JSON number, or a string for values JSON cannot carry.
json real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string csv_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_real(x);
}

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

std::vector<int> mask_members(Mask m) {
  std::vector<int> out;
  for (int v = 0; m; ++v, m >>= 1) {
    if (m & 1) out.push_back(v);
  }
  return out;
}

}  // namespace

ConfigMap parse_config(const std::string& text) {
  ConfigMap out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ValidationError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    if (!out.emplace(key, value).second) {
      throw ValidationError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                            "'");
    }
  }
  return out;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Scenario resolve(const ConfigMap& raw) {
  for (const auto& [key, value] : raw) {
    if (!known_keys().count(key)) throw ValidationError("unknown config key '" + key + "'");
  }
  auto get = [&](const std::string& key) -> std::optional<std::string> {
    auto it = raw.find(key);
    if (it == raw.end()) return std::nullopt;
    return it->second;
  };
  auto get_int = [&](const std::string& key, long long fallback) {
    auto v = get(key);
    return v ? to_integer(key, *v) : fallback;
  };
  auto get_real = [&](const std::string& key) -> std::optional<double> {
    auto v = get(key);
    if (!v) return std::nullopt;
    return to_real(key, *v);
  };

  Scenario s;
  if (auto v = get("mode")) s.mode = parse_mode(*v);
  if (auto v = get("family")) s.family.family = parse_family(*v);
  s.family.n = static_cast<int>(get_int("n", 0));
  s.family.n_side = static_cast<int>(get_int("n_side", 0));
  s.family.d = static_cast<int>(get_int("d", 1));
  s.family.K = get_real("K").value_or(1.0);
  s.family.k = static_cast<int>(get_int("k", 0));
  s.family.r = get_real("r").value_or(0.0);
  if (auto v = get("seed")) s.seed = to_seed("seed", *v);
  s.family.seed = s.seed;
  if (auto v = get("graph_seed")) s.family.seed = to_seed("graph_seed", *v);
  if (auto v = get("graph_file")) s.graph_file = *v;
  if (!get("family") && !s.graph_file && s.mode != Mode::dichotomy) {
    throw ValidationError("scenario needs a 'family' or a 'graph_file'");
  }

  s.h = get_real("h");
  if (auto v = get("fields")) {
    for (const auto& item : split_list(*v)) s.fields.push_back(to_real("fields", item));
  }
  if (auto v = get("payoff")) {
    const auto items = split_list(*v);
    if (items.size() != 4) throw ValidationError("payoff needs four values a, b, c, d");
    s.payoff = PayoffMatrix{to_real("payoff", items[0]), to_real("payoff", items[1]),
                            to_real("payoff", items[2]), to_real("payoff", items[3])};
    risk_dominance_ratio(*s.payoff);
  }
  if (int(s.h.has_value()) + int(!s.fields.empty()) + int(s.payoff.has_value()) > 1) {
    throw ValidationError("set at most one of h, fields and payoff");
  }

  if (auto v = get("kernel")) {
    if (*v == "glauber") {
      s.kernel = KernelKind::glauber;
    } else if (*v == "ellison") {
      s.kernel = KernelKind::ellison;
    } else {
      throw ValidationError("kernel must be glauber or ellison");
    }
  }
  if (auto v = get("update")) {
    if (*v == "async") {
      s.update = UpdateMode::asynchronous;
    } else if (*v == "sync") {
      s.update = UpdateMode::synchronous;
    } else {
      throw ValidationError("update must be async or sync");
    }
  }
  if (auto v = get("beta")) {
    for (const auto& item : split_list(*v)) {
      const double beta = to_real("beta", item);
      if (!(beta >= 0.0) || !std::isfinite(beta)) throw ValidationError("beta must be finite and >= 0");
      s.betas.push_back(beta);
    }
  }
  s.trials = static_cast<int>(get_int("trials", 1000));
  s.max_sweeps = get_real("max_sweeps").value_or(kDefaultMaxSweeps);
  if (auto v = get("out")) s.out = *v;
  s.cap_exact_n = static_cast<int>(get_int("cap_exact_n", kDefaultExactCap));
  const long long workers = get_int("workers", 1);
  if (workers < 1) throw ValidationError("workers must be >= 1");
  s.workers = static_cast<unsigned>(workers);
  s.random_starts = static_cast<int>(get_int("random_starts", 5));
  if (auto v = get("sizes")) {
    s.sizes.clear();
    for (const auto& item : split_list(*v)) s.sizes.push_back(static_cast<int>(to_integer("sizes", item)));
  }
  s.replicates = static_cast<int>(get_int("replicates", 5));
  s.h_chain = get_real("h_chain").value_or(1.0);
  s.h_regular = get_real("h_regular").value_or(0.1);
  s.regular_k = static_cast<int>(get_int("regular_k", 3));
  s.L1 = get_real("L1");
  s.L2 = get_real("L2");
  s.C = get_real("C");
  s.delta = get_real("delta");
  s.lambda = get_real("lambda");
  s.b = static_cast<int>(get_int("b", 0));
  s.alpha = get_real("alpha");
  s.gamma = get_real("gamma");
  s.ell = get_real("ell");
  if (auto v = get("verify")) s.verify = to_bool("verify", *v);

  if (s.mode == Mode::simulate && s.trials < 100) {
    throw ValidationError("simulate mode needs trials >= 100 (got " + std::to_string(s.trials) + ")");
  }
  if ((s.mode == Mode::simulate || s.mode == Mode::exact) && s.betas.empty()) {
    throw ValidationError(to_string(s.mode) + " mode needs at least one beta");
  }
  if (!(s.max_sweeps > 0.0) || !std::isfinite(s.max_sweeps)) {
    throw ValidationError("max_sweeps must be positive and finite");
  }
  if (s.cap_exact_n < 1 || s.cap_exact_n > 20) throw ValidationError("cap_exact_n must be in 1..20");
  if (s.random_starts < 0 || s.replicates < 1) {
    throw ValidationError("random_starts must be >= 0 and replicates >= 1");
  }
  const int crux_keys = int(s.L1.has_value()) + int(s.L2.has_value()) + int(s.C.has_value());
  if (crux_keys != 0 && crux_keys != 3) {
    throw ValidationError("L1, L2 and C must be given together");
  }
  if (s.delta.has_value() != s.lambda.has_value()) {
    throw ValidationError("delta and lambda must be given together");
  }
  if (s.alpha.has_value() != s.gamma.has_value()) {
    throw ValidationError("alpha and gamma must be given together");
  }
  if (s.mode == Mode::exact && s.kernel != KernelKind::glauber) {
    throw ValidationError("exact mode supports the Glauber kernel only");
  }
  if (s.mode == Mode::exact && s.update != UpdateMode::asynchronous) {
    throw ValidationError("exact mode supports asynchronous updates only");
  }
  return s;
}

ConfigMap Scenario::canonical() const {
  ConfigMap c;
  c["mode"] = to_string(mode);
  if (graph_file) {
    c["graph_file"] = *graph_file;
  } else {
    c["family"] = to_string(family.family);
  }
  c["n"] = std::to_string(family.n);
  c["n_side"] = std::to_string(family.n_side);
  c["d"] = std::to_string(family.d);
  c["K"] = format_real(family.K);
  c["k"] = std::to_string(family.k);
  c["r"] = format_real(family.r);
  c["graph_seed"] = std::to_string(family.seed);
  c["h"] = real_or_empty(h);
  c["fields"] = join_reals(fields);
  c["payoff"] = payoff ? join_reals({payoff->a, payoff->b, payoff->c, payoff->d}) : "";
  c["kernel"] = kernel == KernelKind::glauber ? "glauber" : "ellison";
  c["update"] = update == UpdateMode::asynchronous ? "async" : "sync";
  c["beta"] = join_reals(betas);
  c["trials"] = std::to_string(trials);
  c["max_sweeps"] = format_real(max_sweeps);
  c["seed"] = std::to_string(seed);
  c["cap_exact_n"] = std::to_string(cap_exact_n);
  c["random_starts"] = std::to_string(random_starts);
  std::string sz;
  for (int x : sizes) sz += (sz.empty() ? "" : ",") + std::to_string(x);
  c["sizes"] = sz;
  c["replicates"] = std::to_string(replicates);
  c["h_chain"] = format_real(h_chain);
  c["h_regular"] = format_real(h_regular);
  c["regular_k"] = std::to_string(regular_k);
  c["L1"] = real_or_empty(L1);
  c["L2"] = real_or_empty(L2);
  c["C"] = real_or_empty(C);
  c["delta"] = real_or_empty(delta);
  c["lambda"] = real_or_empty(lambda);
  c["b"] = std::to_string(b);
  c["alpha"] = real_or_empty(alpha);
  c["gamma"] = real_or_empty(gamma);
  c["ell"] = real_or_empty(ell);
  c["verify"] = verify ? "true" : "false";
  // `out` and `workers` do not change results, so they stay out of the hash.
  return c;
}

std::string Scenario::config_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [key, value] : canonical()) {
    for (char ch : key + "=" + value + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  return hex64(h);
}

Network build_network(const Scenario& s) {
  Network g = s.graph_file ? read_edge_list_file(*s.graph_file) : generate(s.family);
  if (s.h) return g.with_uniform_field(*s.h);
  if (!s.fields.empty()) {
    if (static_cast<int>(s.fields.size()) != g.size()) {
      throw ValidationError("fields lists " + std::to_string(s.fields.size()) +
                            " values for a graph on " + std::to_string(g.size()) + " vertices");
    }
    return g.with_fields(s.fields);
  }
  if (s.payoff) return g.with_fields(fields_from_payoffs(*s.payoff, g));
  return g;
}

DynamicsSpec dynamics_for(const Scenario& s, double beta) {
  return s.kernel == KernelKind::glauber ? DynamicsSpec::glauber(beta, s.update)
                                         : DynamicsSpec::ellison(beta, s.update);
}

std::vector<ExponentRow> exponent_report(double gamma_star, std::vector<BetaPoint> points) {
  std::sort(points.begin(), points.end(),
            [](const BetaPoint& a, const BetaPoint& b) { return a.beta < b.beta; });
  const double clamped = std::max(gamma_star, 0.0);
  const bool any_censored = std::any_of(points.begin(), points.end(), [](const BetaPoint& p) {
    return p.censored || !(p.tau > 0.0) || !std::isfinite(p.tau);
  });
  std::optional<ExponentFit> fit;
  std::set<double> distinct;
  for (const auto& p : points) distinct.insert(p.beta);
  if (!any_censored && points.size() >= 3 && distinct.size() >= 2) {
    std::vector<BetaEstimate> est;
    for (const auto& p : points) est.push_back({p.beta, p.tau});
    fit = exponent_fit(est);
  }
  std::vector<ExponentRow> rows;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    ExponentRow row;
    row.beta = p.beta;
    row.gamma_star = gamma_star;
    row.gamma_star_clamped = clamped;
    row.tau = p.tau;
    row.sandwich_lo = p.sandwich_lo;
    row.sandwich_hi = p.sandwich_hi;
    if (p.lambda0 > 0.0 && p.beta > 0.0) row.spectral_rate = -std::log(p.lambda0) / (2.0 * p.beta);
    if (fit) {
      row.slope = fit->slope;
      row.slope_stderr = fit->slope_stderr;
      row.slope_discrepancy = fit->slope - clamped;
    }
    if (i > 0 && !any_censored && p.beta != points[i - 1].beta) {
      row.local_slope = (std::log(p.tau) - std::log(points[i - 1].tau)) /
                        (2.0 * (p.beta - points[i - 1].beta));
      row.local_discrepancy = clamped > 0.0 ? std::abs(row.local_slope - clamped) / clamped
                                            : std::abs(row.local_slope);
    }
    row.flag = any_censored ? "censored" : (fit ? "ok" : "few-points");
    rows.push_back(row);
  }
  return rows;
}

namespace {

class Writer {
 public:
  explicit Writer(const Scenario& s) : s_(s), hash_(s.config_hash()) {
    std::error_code ec;
    std::filesystem::create_directories(s.out, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + s.out + ": " + ec.message());
  }

  json header() const {
    json h;
    h["library_version"] = TILTCUT_VERSION;
    h["config_hash"] = hash_;
    h["seed"] = s_.seed;
    json cfg = json::object();
    for (const auto& [k, v] : s_.canonical()) cfg[k] = v;
    h["config"] = cfg;
    return h;
  }

  std::string provenance() const {
    return std::to_string(s_.seed) + "," + hash_ + "," + TILTCUT_VERSION;
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::path(s_.out) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
    written_.push_back(name);
  }

  void write_json(const std::string& name, const json& body) {
    json doc = header();
    doc["result"] = body;
    write(name, doc.dump(2) + "\n");
  }

  std::vector<std::string> files() const { return written_; }

 private:
  const Scenario& s_;
  std::string hash_;
  std::vector<std::string> written_;
};

json barrier_json(const BarrierReport& r) {
  json j;
  j["n"] = r.n;
  j["gamma"] = real(r.gamma);
  j["ordering"] = r.ordering;
  j["delta"] = real(r.delta);
  json omega = json::array();
  for (Mask m : r.omega_witness) omega.push_back(mask_members(m));
  j["omega_witness"] = omega;
  j["gamma_star"] = real(r.gamma_star);
  j["f_star"] = mask_members(r.f_star);
  j["f_star_ordering"] = r.f_star_ordering;
  if (r.has_general_barrier) {
    j["general_barrier"] = real(r.general_barrier);
    j["worst_start"] = mask_members(r.worst_start);
  }
  j["verified"] = r.verified;
  if (r.verified) {
    j["max_delta"] = real(r.max_delta);
    j["duality_holds"] = r.duality_holds;
  }
  j["heuristic"] = r.heuristic;
  return j;
}

std::string trial_csv_header() {
  return "trial_id,seed,beta,family,n,T_plus_sweeps,censored,root_seed,config_hash,library_version\n";
}

std::string family_label(const Scenario& s) {
  return s.graph_file ? std::string("file") : to_string(s.family.family);
}

std::string exponent_csv(const std::string& prov, std::uint64_t graph_hash, const std::string& family,
                         int n, const std::vector<ExponentRow>& rows) {
  std::string out =
      "graph_hash,family,n,beta,gamma_star,gamma_star_clamped,slope_fit,slope_se,"
      "slope_discrepancy,local_slope,local_discrepancy,spectral_rate,sandwich_lo,sandwich_hi,"
      "tau_hat,flag,seed,config_hash,library_version\n";
  for (const auto& r : rows) {
    out += hex64(graph_hash) + "," + family + "," + std::to_string(n) + "," + csv_real(r.beta) +
           "," + csv_real(r.gamma_star) + "," + csv_real(r.gamma_star_clamped) + "," +
           csv_real(r.slope) + "," + csv_real(r.slope_stderr) + "," +
           csv_real(r.slope_discrepancy) + "," + csv_real(r.local_slope) + "," +
           csv_real(r.local_discrepancy) + "," + csv_real(r.spectral_rate) + "," +
           csv_real(r.sandwich_lo) + "," + csv_real(r.sandwich_hi) + "," + csv_real(r.tau) +
           "," + r.flag + "," + prov + "\n";
  }
  return out;
}

std::optional<double> exact_gamma_star(const Network& g, unsigned workers) {
  if (g.size() > kGammaStarCap) return std::nullopt;
  GammaStarOptions opt;
  opt.with_general_barrier = false;
  opt.workers = workers;
  return gamma_star(g, opt).gamma_star;
}

struct ExactPoint {
  EigenReport eigen;
  SpectralSandwich sandwich;
  StateQuantile quantile;
};

ExactPoint exact_point(const Network& g, const DynamicsSpec& spec, int cap) {
  const auto ss = build_state_space(g, spec, cap);
  ExactPoint p;
  p.eigen = leading_eigenpair(ss);
  p.sandwich = spectral_sandwich(ss, p.eigen);
  p.quantile = exact_hitting_quantile(ss, 0, &p.eigen);
  return p;
}

void run_simulate(const Scenario& s, Writer& w) {
  const Network g = build_network(s);
  const auto ghash = network_hash(g);
  std::string csv = trial_csv_header();
  json per_beta = json::array();
  std::vector<BetaPoint> points;
  const bool exact_ok = g.size() <= s.cap_exact_n && s.kernel == KernelKind::glauber &&
                        s.update == UpdateMode::asynchronous;
  for (std::size_t b = 0; b < s.betas.size(); ++b) {
    const double beta = s.betas[b];
    const auto spec = dynamics_for(s, beta);
    SimulationOptions opt;
    opt.n_trials = s.trials;
    opt.max_sweeps = s.max_sweeps;
    opt.seed = derive_seed(s.seed, b);
    opt.workers = s.workers;
    const auto est = typical_hitting_time(g, spec, opt);
    for (int t = 0; t < est.n_trials; ++t) {
      const bool cens = std::isinf(est.samples[t]);
      csv += std::to_string(t) + "," + std::to_string(est.trial_seeds[t]) + "," + csv_real(beta) +
             "," + family_label(s) + "," + std::to_string(g.size()) + "," +
             (cens ? std::string("inf") : csv_real(est.samples[t])) + "," + (cens ? "1" : "0") +
             "," + w.provenance() + "\n";
    }
    json jb;
    jb["beta"] = beta;
    jb["tau_hat_sweeps"] = real(est.quantile_value);
    jb["n_trials"] = est.n_trials;
    jb["n_censored"] = est.n_censored;
    jb["unreliable"] = est.unreliable;
    jb["seed"] = est.seed;
    BetaPoint pt{beta, est.quantile_value, est.n_censored > 0 && std::isinf(est.quantile_value)};
    if (!spec.is_monotone() || s.update == UpdateMode::synchronous) {
      // No monotone coupling to single out the all-(-1) start: scan random starts.
      double worst = est.quantile_value;
      json starts = json::array();
      Rng pick(derive_seed(opt.seed, 0x5354415254ULL));
      for (int r = 0; r < s.random_starts; ++r) {
        VertexSubset start(g.size());
        for (int v = 0; v < g.size(); ++v) {
          if (uniform01(pick) < 0.5) start.insert(v);
        }
        SimulationOptions o2 = opt;
        o2.seed = derive_seed(opt.seed, 1000 + r);
        const auto e2 = typical_hitting_time(g, spec, start, o2);
        starts.push_back({{"start", start.members()}, {"tau_hat_sweeps", real(e2.quantile_value)}});
        worst = std::max(worst, e2.quantile_value);
      }
      jb["random_starts"] = starts;
      jb["worst_start_tau_hat_sweeps"] = real(worst);
      jb["worst_start_is_lower_bound_on_sup"] = true;
    }
    if (exact_ok) {
      const auto ep = exact_point(g, spec, s.cap_exact_n);
      pt.lambda0 = ep.eigen.lambda0;
      pt.sandwich_lo = ep.sandwich.lower / g.size();
      pt.sandwich_hi = ep.sandwich.upper / g.size();
      jb["exact_tau_sweeps"] = real(ep.quantile.sweeps);
    }
    points.push_back(pt);
    per_beta.push_back(jb);
  }
  w.write("trials.csv", csv);
  json body;
  body["graph_hash"] = hex64(ghash);
  body["family"] = family_label(s);
  body["n"] = g.size();
  body["kernel"] = s.kernel == KernelKind::glauber ? "glauber" : "ellison";
  body["per_beta"] = per_beta;
  w.write_json("summary.json", body);
  if (auto gs = exact_gamma_star(g, s.workers)) {
    w.write("exponent_report.csv",
            exponent_csv(w.provenance(), ghash, family_label(s), g.size(), exponent_report(*gs, points)));
  }
}

void run_exact(const Scenario& s, Writer& w) {
  const Network g = build_network(s);
  if (g.size() > s.cap_exact_n) {
    throw CapExceeded("exact mode: n = " + std::to_string(g.size()) + " exceeds cap_exact_n = " +
                      std::to_string(s.cap_exact_n));
  }
  const auto ghash = network_hash(g);
  json records = json::array();
  std::vector<BetaPoint> points;
  for (double beta : s.betas) {
    const auto spec = dynamics_for(s, beta);
    const auto ep = exact_point(g, spec, s.cap_exact_n);
    json r;
    r["graph_hash"] = hex64(ghash);
    r["beta"] = beta;
    r["kernel"] = "glauber";
    r["lambda0"] = real(ep.eigen.lambda0);
    r["lambda1"] = real(ep.eigen.lambda1);
    r["spectral_gap"] = real(ep.eigen.spectral_gap);
    r["gap_flag"] = ep.eigen.gap_flag;
    r["residual"] = real(ep.eigen.residual);
    r["iterations"] = ep.eigen.iterations;
    r["method"] = ep.eigen.method;
    r["sandwich_lower_steps"] = real(ep.sandwich.lower);
    r["sandwich_upper_steps"] = real(ep.sandwich.upper);
    r["sandwich_resolved"] = ep.sandwich.resolved;
    r["tau_steps"] = real(ep.quantile.steps);
    r["tau_sweeps"] = real(ep.quantile.sweeps);
    r["censored"] = ep.quantile.censored;
    r["inside_sandwich"] = ep.sandwich.resolved && !ep.quantile.censored &&
                           ep.quantile.steps >= ep.sandwich.lower * (1 - 1e-9) &&
                           ep.quantile.steps <= ep.sandwich.upper * (1 + 1e-9);
    records.push_back(r);
    points.push_back({beta, ep.quantile.sweeps, ep.quantile.censored, ep.eigen.lambda0,
                      ep.sandwich.lower / g.size(), ep.sandwich.upper / g.size()});
  }
  json body;
  body["graph_hash"] = hex64(ghash);
  body["n"] = g.size();
  body["records"] = records;
  w.write_json("exact.json", body);
  if (auto gs = exact_gamma_star(g, s.workers)) {
    w.write("exponent_report.csv",
            exponent_csv(w.provenance(), ghash, family_label(s), g.size(), exponent_report(*gs, points)));
  }
}

void run_barriers(const Scenario& s, Writer& w) {
  const Network g = build_network(s);
  GammaStarOptions opt;
  opt.verify = s.verify;
  opt.workers = s.workers;
  const auto rep = gamma_star(g, opt);
  json body = barrier_json(rep);
  body["graph_hash"] = hex64(network_hash(g));
  w.write_json("barriers.json", body);
}

void run_bounds(const Scenario& s, Writer& w) {
  const Network g = build_network(s);
  json body;
  body["graph_hash"] = hex64(network_hash(g));
  if (auto gs = exact_gamma_star(g, s.workers)) body["gamma_star_exact"] = real(*gs);
  if (s.L1) {
    const auto cert = crux_partition(g, *s.L1, *s.L2, *s.C, {.seed = s.seed});
    json c;
    json blocks = json::array();
    for (const auto& b : cert.blocks) {
      blocks.push_back({{"vertices", b.vertices.members()},
                        {"extraction_value", real(b.extraction_value)},
                        {"cutwidth", b.cutwidth},
                        {"residual", b.residual}});
    }
    c["blocks"] = blocks;
    c["L1"] = cert.L1;
    c["L2"] = cert.L2;
    c["C"] = cert.C;
    c["ordering"] = cert.ordering;
    c["achieved_width_4h"] = real(cert.achieved_width);
    c["hypothesis_holds"] = cert.hypothesis_holds;
    if (cert.failing_set) c["failing_set"] = cert.failing_set->members();
    c["blocks_within_C"] = cert.blocks_within_C;
    c["heuristic"] = cert.heuristic;
    c["valid"] = cert.valid;
    c["telescoping_holds"] = telescoping_holds(g, cert);
    body["partition_certificate"] = c;
  }
  if (s.delta) {
    const auto eb = expander_lower_bound(g, VertexSubset::full(g.size()), *s.delta, *s.lambda, s.b);
    body["expander_bound"] = {{"value", real(eb.value)},
                              {"useful", eb.useful},
                              {"verified", eb.verified},
                              {"note", eb.note}};
  }
  if (s.alpha) {
    const auto ib = isoperimetric_upper_bound(*s.alpha, *s.gamma, g.min_field(), g.max_field());
    body["isoperimetric_bound"] = {{"a_prime", real(ib.a_prime)}, {"L1", real(ib.L1)},
                                   {"L2", real(ib.L2)},           {"C", real(ib.C)},
                                   {"value", real(ib.value)}};
  }
  if (s.ell) {
    const auto f = grid_bump(g, *s.ell);
    SweepInput in{f, g.fields(), VertexSubset(g.size()), VertexSubset(g.size()), 0.0, 0.0};
    for (int i = 0; i < g.size(); ++i) {
      if (f[i] != 0.0) in.omega0.insert(i);
      if (f[i] == 1.0) in.omega1.insert(i);
    }
    in.L1 = weighted_size(g, in.omega1);
    in.L2 = weighted_size(g, in.omega0);
    const auto sr = cheeger_sweep(g, in);
    body["cheeger_sweep"] = {{"chosen", sr.chosen.members()},  {"threshold", real(sr.threshold)},
                             {"ratio", real(sr.ratio)},        {"lambda", real(sr.lambda)},
                             {"certified", real(sr.certified)}, {"inequality_holds", sr.inequality_holds}};
  }
  w.write_json("bounds.json", body);
}

void run_dichotomy(const Scenario& s, Writer& w) {
  std::string csv = "family,n,replicate,graph_seed,gamma_star,seed,config_hash,library_version\n";
  json chain = json::array();
  std::map<int, std::vector<double>> regular;
  for (int n : s.sizes) {
    const Network path = grid(n, 1).with_uniform_field(s.h_chain);
    const auto gs = exact_gamma_star(path, s.workers);
    if (!gs) throw CapExceeded("dichotomy: n = " + std::to_string(n) + " exceeds the gamma_star cap");
    csv += "chain," + std::to_string(n) + ",0,0," + csv_real(*gs) + "," + w.provenance() + "\n";
    chain.push_back({{"n", n}, {"gamma_star", real(*gs)}});
    for (int r = 0; r < s.replicates; ++r) {
      const std::uint64_t gseed = derive_seed(s.seed, r);
      const Network g = random_regular(n, s.regular_k, gseed).with_uniform_field(s.h_regular);
      const double v = *exact_gamma_star(g, s.workers);
      regular[r].push_back(v);
      csv += "random_regular," + std::to_string(n) + "," + std::to_string(r) + "," +
             std::to_string(gseed) + "," + csv_real(v) + "," + w.provenance() + "\n";
    }
  }
  w.write("dichotomy.csv", csv);
  bool flat = true;
  for (const auto& row : chain) flat = flat && row["gamma_star"] == chain.front()["gamma_star"];
  int increasing = 0;
  json reg = json::array();
  for (const auto& [r, values] : regular) {
    bool inc = true;
    for (std::size_t i = 1; i < values.size(); ++i) inc = inc && values[i] > values[i - 1];
    increasing += inc ? 1 : 0;
    reg.push_back({{"replicate", r}, {"gamma_star", values}, {"strictly_increasing", inc}});
  }
  json body;
  body["sizes"] = s.sizes;
  body["chain"] = chain;
  body["chain_constant"] = flat;
  body["random_regular"] = reg;
  body["random_regular_increasing"] = increasing;
  w.write_json("dichotomy.json", body);
}

}  // namespace

std::vector<std::string> run(const Scenario& s) {
  Writer w(s);
  switch (s.mode) {
    case Mode::simulate: run_simulate(s, w); break;
    case Mode::exact: run_exact(s, w); break;
    case Mode::barriers: run_barriers(s, w); break;
    case Mode::bounds: run_bounds(s, w); break;
    case Mode::dichotomy: run_dichotomy(s, w); break;
  }
  return w.files();
}

}  // namespace tiltcut::cli
