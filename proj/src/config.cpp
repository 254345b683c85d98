#include "mobius_flock/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <vector>

#include "mobius_flock/errors.hpp"

#ifndef MOBIUS_FLOCK_CONFIG_DIR
#define MOBIUS_FLOCK_CONFIG_DIR "configs"
#endif

namespace mobius_flock {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

double parse_atom(const std::string& raw) {
  std::string t = trim(raw);
  bool neg = false;
  while (!t.empty() && (t[0] == '-' || t[0] == '+')) {
    if (t[0] == '-') neg = !neg;
    t = trim(t.substr(1));
  }
  double v;
  if (t == "pi") {
    v = std::numbers::pi;
  } else if (t.rfind("sqrt(", 0) == 0 && t.back() == ')') {
    const double inner = parse_number(t.substr(5, t.size() - 6));
    if (inner < 0) throw InvalidConfig("sqrt of negative value in '" + raw + "'");
    v = std::sqrt(inner);
  } else {
    std::size_t used = 0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw InvalidConfig("cannot parse number '" + raw + "'");
    }
    if (used != t.size()) throw InvalidConfig("trailing characters in number '" + raw + "'");
  }
  return neg ? -v : v;
}

Complex parse_complex_pair(const std::string& v) {
  const auto c = v.find(',');
  if (c == std::string::npos) return {parse_number(v), 0.0};
  return {parse_number(v.substr(0, c)), parse_number(v.substr(c + 1))};
}

int parse_int(const std::string& v, const std::string& key) {
  const double d = parse_number(v);
  if (d != std::floor(d)) throw InvalidConfig(key + " must be an integer");
  return static_cast<int>(d);
}

constexpr double kDeg = std::numbers::pi / 180.0;

AgentStateOriginal parse_agent(const std::string& key, const std::string& v) {
  const auto w = split_ws(v);
  if (w.size() != 5) {
    throw InvalidConfig(key + ": expected '<polar|cart> a b v theta_deg', got '" + v + "'");
  }
  AgentStateOriginal x;
  const std::string form = lower(w[0]);
  if (form == "polar") {
    x.r = std::polar(parse_number(w[1]), parse_number(w[2]) * kDeg);
  } else if (form == "cart") {
    x.r = {parse_number(w[1]), parse_number(w[2])};
  } else {
    throw InvalidConfig(key + ": position form must be 'polar' or 'cart'");
  }
  x.v = parse_number(w[3]);
  x.theta = parse_number(w[4]) * kDeg;
  return x;
}

const std::set<std::string> kKnownKeys = {
    "lambda", "mu", "desired_center", "desired_radius", "boundary_center",
    "boundary_radius", "root", "kappa1", "kappa2", "K", "s_d", "delta_S",
    "pattern", "plane", "dt", "t_final", "log_stride", "seed", "graph", "n",
    "edges", "initial", "refine_tol", "max_refine_depth", "max_substeps", "kernel",
    "precision"};

}  // namespace

double parse_number(const std::string& text) {
  // Left-to-right chain of atoms joined by '*' or '/', outside parentheses.
  const std::string t = trim(text);
  if (t.empty()) throw InvalidConfig("empty number");
  double acc = 0.0;
  char op = 0;
  int depth = 0;
  std::size_t start = 0;
  auto apply = [&](const std::string& piece) {
    const double v = parse_atom(piece);
    if (op == 0) acc = v;
    else if (op == '*') acc *= v;
    else acc /= v;
  };
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char c = t[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth == 0 && (c == '*' || c == '/')) {
      apply(t.substr(start, i - start));
      op = c;
      start = i + 1;
    }
  }
  if (depth != 0) throw InvalidConfig("unbalanced parentheses in '" + text + "'");
  apply(t.substr(start));
  return acc;
}

Plane parse_plane(const std::string& s) {
  const auto l = lower(trim(s));
  if (l == "original") return Plane::Original;
  if (l == "transformed") return Plane::Transformed;
  if (l == "crosscheck") return Plane::CrossCheck;
  throw InvalidConfig("plane must be original|transformed|crosscheck, got '" + s + "'");
}

Pattern parse_pattern(const std::string& s) {
  const auto l = lower(trim(s));
  if (l == "sync") return Pattern::Sync;
  if (l == "balance") return Pattern::Balance;
  throw InvalidConfig("pattern must be sync|balance, got '" + s + "'");
}

RootKind parse_root(const std::string& s) {
  const auto l = lower(trim(s));
  if (l == "smaller") return RootKind::Smaller;
  if (l == "larger") return RootKind::Larger;
  throw InvalidConfig("root must be smaller|larger, got '" + s + "'");
}

LoadedConfig parse_config(const std::string& text, const std::string& source) {
  LoadedConfig out;
  out.source = source;
  std::map<std::string, std::string> agents;
  std::istringstream is(text);
  int lineno = 0;
  for (std::string line; std::getline(is, line);) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig(source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.rfind("agent.", 0) == 0) {
      agents[key] = val;
      continue;
    }
    if (!kKnownKeys.count(key)) {
      throw InvalidConfig(source + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    out.entries[key] = val;
  }
  const auto& e = out.entries;
  auto has = [&](const char* k) { return e.count(k) > 0; };
  auto num = [&](const char* k, double def) { return has(k) ? parse_number(e.at(k)) : def; };

  SimConfig& c = out.sim;
  const RootKind root = has("root") ? parse_root(e.at("root")) : RootKind::Smaller;
  if (has("desired_radius") || has("boundary_radius")) {
    auto [pair, frame] = normalize_circles(
        has("desired_center") ? parse_complex_pair(e.at("desired_center")) : Complex{},
        num("desired_radius", 1.0),
        has("boundary_center") ? parse_complex_pair(e.at("boundary_center")) : Complex{},
        num("boundary_radius", 0.0));
    c.ctx = MobiusContext::make(pair, root);
    out.frame = frame;
  } else {
    if (!has("lambda") || !has("mu")) throw InvalidConfig("lambda and mu are required");
    c.ctx = MobiusContext::make(num("lambda", 0.0), num("mu", 0.0), root);
  }

  c.gains.kappa1 = num("kappa1", c.gains.kappa1);
  c.gains.kappa2 = num("kappa2", c.gains.kappa2);
  c.gains.K = num("K", c.gains.K);
  c.gains.s_d = num("s_d", c.gains.s_d);
  c.gains.delta_S = num("delta_S", c.gains.delta_S);
  if (has("pattern")) c.pattern = parse_pattern(e.at("pattern"));
  if (has("plane")) c.plane = parse_plane(e.at("plane"));
  c.dt = num("dt", c.dt);
  c.t_final = num("t_final", c.t_final);
  if (has("log_stride")) c.log_stride = parse_int(e.at("log_stride"), "log_stride");
  if (has("seed")) c.seed = static_cast<std::uint64_t>(parse_int(e.at("seed"), "seed"));
  c.refine_tol = num("refine_tol", c.refine_tol);
  if (has("max_refine_depth")) {
    c.max_refine_depth = parse_int(e.at("max_refine_depth"), "max_refine_depth");
  }
  if (has("max_substeps")) {
    const double m = parse_number(e.at("max_substeps"));
    if (m < 0 || m != std::floor(m)) throw InvalidConfig("max_substeps must be a non-negative integer");
    c.max_substeps = static_cast<long>(m);
  }
  if (has("kernel")) {
    const auto k = lower(e.at("kernel"));
    if (k == "auto") c.kernel = KernelChoice::Auto;
    else if (k == "serial") c.kernel = KernelChoice::Serial;
    else if (k == "openmp") c.kernel = KernelChoice::OpenMP;
    else throw InvalidConfig("kernel must be auto|serial|openmp");
  }
  if (has("precision")) {
    const auto pr = lower(e.at("precision"));
    if (pr == "double") c.extended_precision = false;
    else if (pr == "extended") c.extended_precision = true;
    else throw InvalidConfig("precision must be double|extended");
  }

  // Agents: explicit agent.<k> lines, or initial = random with n and seed.
  std::vector<AgentStateOriginal> states;
  if (!agents.empty()) {
    const int n_agents = static_cast<int>(agents.size());
    states.resize(n_agents);
    std::vector<bool> seen(n_agents, false);
    for (const auto& [key, val] : agents) {
      const int idx = parse_int(key.substr(6), key);
      if (idx < 1 || idx > n_agents || seen[idx - 1]) {
        throw InvalidConfig("agent indices must be 1.." + std::to_string(n_agents) +
                            " without gaps");
      }
      seen[idx - 1] = true;
      AgentStateOriginal x = parse_agent(key, val);
      if (out.frame) {
        x.r = out.frame->to_canonical(x.r);
        x.v = out.frame->speed_to_canonical(x.v);
        x.theta = out.frame->heading_to_canonical(x.theta);
      }
      states[idx - 1] = x;
    }
  }
  const bool random = has("initial") && lower(e.at("initial")) == "random";
  if (has("initial") && !random) throw InvalidConfig("initial must be 'random' if given");
  int n = has("n") ? parse_int(e.at("n"), "n") : static_cast<int>(states.size());
  if (random) {
    if (!states.empty()) throw InvalidConfig("initial = random conflicts with agent.<k> lines");
    states = random_feasible_states(c.ctx, c.gains, n, c.seed);
  }
  if (!states.empty() && n != static_cast<int>(states.size())) {
    throw InvalidConfig("n = " + std::to_string(n) + " but " +
                        std::to_string(states.size()) + " agents given");
  }
  c.initial_states = states;

  if (n >= 2) {
    const std::string g = has("graph") ? lower(e.at("graph")) : "cycle";
    if (g == "edges") {
      if (!has("edges")) throw InvalidConfig("graph = edges needs an edges line");
      std::vector<std::pair<int, int>> edges;
      for (const auto& tok : split_ws(e.at("edges"))) {
        const auto dash = tok.find('-');
        if (dash == std::string::npos) throw InvalidConfig("edge '" + tok + "' is not j-k");
        edges.emplace_back(parse_int(tok.substr(0, dash), "edge"),
                           parse_int(tok.substr(dash + 1), "edge"));
      }
      c.graph = build_graph(n, edges);
    } else {
      c.graph = preset_graph(g, n);
    }
  }
  return out;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

std::string bundled_config_path(const std::string& name) {
  const char* env = std::getenv("MOBIUS_FLOCK_CONFIG_DIR");
  const std::string dir = env && *env ? env : MOBIUS_FLOCK_CONFIG_DIR;
  return dir + "/" + name + ".cfg";
}

}  // namespace mobius_flock
