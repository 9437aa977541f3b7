// SPDX-License-Identifier: Apache-2.0
#include "aabsp_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <vector>

#include "aabsp/error.hpp"

namespace aabsp::cli {
namespace {

namespace pt = boost::property_tree;

struct IndexedKey {
  std::string base;
  std::vector<int> idx;
};

// "a_1_2" -> {"a", {1, 2}}; a trailing part that is not a positive integer
// belongs to the base name.
IndexedKey split_key(const std::string& key) {
  IndexedKey out;
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = key.find('_', start);
    parts.push_back(key.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  std::size_t k = parts.size();
  while (k > 1) {
    const std::string& p = parts[k - 1];
    int v = 0;
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v);
    if (ec != std::errc{} || ptr != p.data() + p.size() || v < 0) break;
    --k;
  }
  for (std::size_t i = 0; i < k; ++i) out.base += (i ? "_" : "") + parts[i];
  for (std::size_t i = k; i < parts.size(); ++i) out.idx.push_back(std::stoi(parts[i]));
  return out;
}

double to_double(const std::string& text, const std::string& field) {
  double v = 0.0;
  const char* b = text.data();
  const char* e = b + text.size();
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e) throw ConfigError("not a number: '" + text + "'", field);
  return v;
}

int to_int(const std::string& text, const std::string& field) {
  int v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  const auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc{} || ptr != e) throw ConfigError("not an integer: '" + text + "'", field);
  return v;
}

bool to_bool(const std::string& text, const std::string& field) {
  if (text == "true" || text == "yes" || text == "1") return true;
  if (text == "false" || text == "no" || text == "0") return false;
  throw ConfigError("not a boolean: '" + text + "'", field);
}

std::string path(const std::string& section, const std::string& key) {
  return section + "." + key;
}

[[noreturn]] void unknown(const std::string& section, const std::string& key) {
  throw ConfigError("unknown key", path(section, key));
}

// Per-index values of one indexed family (alpha_1, alpha_2, ...).
using Family = std::map<int, double>;

std::vector<double> dense(const Family& f, int J, const std::string& section,
                          const std::string& base) {
  std::vector<double> out;
  for (int j = 1; j <= J; ++j) {
    const auto it = f.find(j);
    if (it == f.end())
      throw ConfigError("missing", path(section, base + "_" + std::to_string(j)));
    out.push_back(it->second);
  }
  return out;
}

int max_index(std::initializer_list<const Family*> fams) {
  int J = 0;
  for (const Family* f : fams)
    if (!f->empty()) J = std::max(J, f->rbegin()->first);
  return J;
}

void check_index(const IndexedKey& k, std::size_t count, const std::string& section,
                 const std::string& key) {
  if (k.idx.size() != count) unknown(section, key);
  for (int i : k.idx)
    if (i < 1) throw ConfigError("indices are 1-based", path(section, key));
}

PriorSpec parse_priors(const pt::ptree& sec) {
  Family alpha, beta, l;
  for (const auto& [key, node] : sec) {
    const IndexedKey k = split_key(key);
    Family* f = k.base == "alpha" ? &alpha : k.base == "beta" ? &beta : k.base == "l" ? &l : nullptr;
    if (!f) unknown("priors", key);
    check_index(k, 1, "priors", key);
    (*f)[k.idx[0]] = to_double(node.data(), path("priors", key));
  }
  const int J = max_index({&alpha, &beta, &l});
  if (J == 0) throw ConfigError("no competing risks defined", "priors");
  const auto a = dense(alpha, J, "priors", "alpha");
  const auto b = dense(beta, J, "priors", "beta");
  const auto ll = dense(l, J, "priors", "l");
  std::vector<CausePrior> causes;
  for (int j = 0; j < J; ++j) causes.push_back({a[j], b[j], ll[j]});
  return PriorSpec(std::move(causes));
}

CostModel parse_costs(const pt::ptree& sec) {
  std::map<std::string, double> v;
  static const std::set<std::string> keys{"C_s", "v_s", "C_t", "C_a", "C_r"};
  for (const auto& [key, node] : sec) {
    if (!keys.count(key)) unknown("costs", key);
    v[key] = to_double(node.data(), path("costs", key));
  }
  for (const auto& k : keys)
    if (!v.count(k)) throw ConfigError("missing", path("costs", k));
  return CostModel(v["C_s"], v["v_s"], v["C_t"], v["C_a"], v["C_r"]);
}

LossPoly parse_loss(const pt::ptree& sec, std::optional<int> J_hint) {
  std::optional<double> a0;
  Family lin;
  std::map<std::pair<int, int>, double> quad;
  for (const auto& [key, node] : sec) {
    const IndexedKey k = split_key(key);
    if (k.base != "a") unknown("loss", key);
    const double v = to_double(node.data(), path("loss", key));
    if (k.idx.size() == 1 && k.idx[0] == 0) {
      a0 = v;
    } else if (k.idx.size() == 1) {
      lin[k.idx[0]] = v;
    } else {
      check_index(k, 2, "loss", key);
      if (k.idx[0] > k.idx[1])
        throw ConfigError("quadratic coefficients are given as a_i_j with i <= j", path("loss", key));
      quad[{k.idx[0], k.idx[1]}] = v;
    }
  }
  if (!a0) throw ConfigError("missing", "loss.a_0");
  int J = J_hint.value_or(max_index({&lin}));
  for (const auto& [ij, v] : quad)
    if (ij.second > J) throw ConfigError("index exceeds the number of risks", path("loss", "a_" + std::to_string(ij.first) + "_" + std::to_string(ij.second)));
  if (!lin.empty() && lin.rbegin()->first > J)
    throw ConfigError("index exceeds the number of risks",
                      path("loss", "a_" + std::to_string(lin.rbegin()->first)));
  const auto linear = dense(lin, J, "loss", "a");
  std::vector<double> upper;
  for (int i = 1; i <= J; ++i)
    for (int j = i; j <= J; ++j) {
      const auto it = quad.find({i, j});
      if (it == quad.end())
        throw ConfigError("missing", path("loss", "a_" + std::to_string(i) + "_" + std::to_string(j)));
      upper.push_back(it->second);
    }
  return LossPoly(*a0, linear, upper);
}

void parse_search(const pt::ptree& sec, SearchConfig& cfg) {
  for (const auto& [key, node] : sec) {
    const std::string f = path("search", key);
    const std::string& v = node.data();
    if (key == "n_max") cfg.n_max_override = to_int(v, f);
    else if (key == "full_bound") cfg.full_bound = to_bool(v, f);
    else if (key == "grid_points") cfg.grid_points = to_int(v, f);
    else if (key == "tau_tol") cfg.tau_tol = to_double(v, f);
    else if (key == "tau1_hi") cfg.tau1_bracket_hi = to_double(v, f);
    else if (key == "fixed_tau1") cfg.fixed_tau1 = to_double(v, f);
    else if (key == "threads") cfg.threads = to_int(v, f);
    else if (key == "mode") {
      try {
        cfg.mode = parse_mode(v);
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), f);
      }
    } else unknown("search", key);
  }
}

Plan parse_plan(const pt::ptree& sec) {
  std::optional<int> n, r;
  int m = 0;
  double tau1 = 0.0;
  for (const auto& [key, node] : sec) {
    const std::string f = path("plan", key);
    if (key == "n") n = to_int(node.data(), f);
    else if (key == "r") r = to_int(node.data(), f);
    else if (key == "m") m = to_int(node.data(), f);
    else if (key == "tau1") tau1 = to_double(node.data(), f);
    else unknown("plan", key);
  }
  if (!n) throw ConfigError("missing", "plan.n");
  if (!r) throw ConfigError("missing", "plan.r");
  return Plan(*n, *r, m, tau1);
}

Theta parse_theta(const pt::ptree& sec) {
  Family lambda, phi;
  for (const auto& [key, node] : sec) {
    const IndexedKey k = split_key(key);
    Family* f = k.base == "lambda" ? &lambda : k.base == "phi" ? &phi : nullptr;
    if (!f) unknown("theta", key);
    check_index(k, 1, "theta", key);
    (*f)[k.idx[0]] = to_double(node.data(), path("theta", key));
  }
  const int J = max_index({&lambda, &phi});
  if (J == 0) throw ConfigError("no rates defined", "theta");
  return Theta(dense(lambda, J, "theta", "lambda"), dense(phi, J, "theta", "phi"));
}

DataMeta parse_data(const pt::ptree& sec) {
  DataMeta d;
  for (const auto& [key, node] : sec) {
    const std::string f = path("data", key);
    const std::string& v = node.data();
    if (key == "n") d.n = to_int(v, f);
    else if (key == "tau1") d.tau1 = to_double(v, f);
    else if (key == "r") d.r = to_int(v, f);
    else if (key == "tau2") d.tau2 = to_double(v, f);
    else if (key == "stress_changed") d.stress_changed = to_bool(v, f);
    else if (key == "regime") {
      try {
        d.regime = parse_regime(v);
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), f);
      }
    } else unknown("data", key);
  }
  return d;
}

}  // namespace

const PriorSpec& RunConfig::require_priors() const {
  if (!priors) throw ConfigError("section is required", "priors");
  return *priors;
}

const CostModel& RunConfig::require_costs() const {
  if (!costs) throw ConfigError("section is required", "costs");
  return *costs;
}

const LossPoly& RunConfig::require_loss() const {
  if (!loss) throw ConfigError("section is required", "loss");
  return *loss;
}

const Theta& RunConfig::require_theta() const {
  if (!theta) throw ConfigError("section is required", "theta");
  return *theta;
}

SearchMode parse_mode(const std::string& text) {
  if (text == "aabsp") return SearchMode::aabsp;
  if (text == "cbsp") return SearchMode::cbsp;
  if (text == "acbsp") return SearchMode::acbsp;
  throw ConfigError("expected one of aabsp, cbsp, acbsp; got '" + text + "'", "mode");
}

Regime parse_regime(const std::string& text) {
  if (text == "type2" || text == "TYPE2") return Regime::type2;
  if (text == "type1" || text == "TYPE1") return Regime::type1;
  throw ConfigError("expected type1 or type2; got '" + text + "'", "regime");
}

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(e.message(), e.line());
  }
  RunConfig cfg;
  for (const auto& [name, sec] : tree) {
    if (sec.empty() && !sec.data().empty()) throw ConfigError("key outside any section", name);
    if (name == "priors") cfg.priors = parse_priors(sec);
    else if (name == "costs") cfg.costs = parse_costs(sec);
    else if (name == "search") parse_search(sec, cfg.search);
    else if (name == "plan") cfg.plan = parse_plan(sec);
    else if (name == "theta") cfg.theta = parse_theta(sec);
    else if (name == "data") cfg.data = parse_data(sec);
    else if (name != "loss") throw ConfigError("unknown section", name);
  }
  // The loss needs J from the priors when both are present.
  if (const auto sec = tree.get_child_optional("loss")) {
    std::optional<int> J;
    if (cfg.priors) J = cfg.priors->J();
    cfg.loss = parse_loss(*sec, J);
  }
  if (cfg.priors && cfg.loss) check_compatible(*cfg.priors, *cfg.loss);
  if (cfg.priors && cfg.theta && cfg.theta->J() != cfg.priors->J())
    throw ConfigError("number of rates differs from the number of priors", "theta");
  cfg.search.validate();
  return cfg;
}

RunConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open '" + file + "'", "config");
  return parse_config(in);
}

}  // namespace aabsp::cli
