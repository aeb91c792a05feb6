#include "conslab/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "conslab/error.hpp"

namespace conslab {

GridPtr GridSpec::build() const { return make_grid(l1, l2, n1, n2, nz, zmax, stretch); }

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw InvalidArgument("config line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& v, int line, const std::string& key) {
  double x = 0.0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end) fail(line, "'" + key + "' expects a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& v, int line, const std::string& key) {
  long long x = 0;
  const auto* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, x);
  if (r.ec != std::errc() || r.ptr != end) fail(line, "'" + key + "' expects an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  fail(line, "'" + key + "' expects true/false, got '" + v + "'");
}

}  // namespace

Config parse_config(const std::string& text) {
  Config c;
  std::map<std::string, int> seen;
  using Setter = std::function<void(const std::string&, int, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"grid.l1", [&](auto& v, int l, auto& k) { c.grid.l1 = to_double(v, l, k); }},
      {"grid.l2", [&](auto& v, int l, auto& k) { c.grid.l2 = to_double(v, l, k); }},
      {"grid.n1", [&](auto& v, int l, auto& k) { c.grid.n1 = static_cast<int>(to_int(v, l, k)); }},
      {"grid.n2", [&](auto& v, int l, auto& k) { c.grid.n2 = static_cast<int>(to_int(v, l, k)); }},
      {"grid.nz", [&](auto& v, int l, auto& k) { c.grid.nz = static_cast<int>(to_int(v, l, k)); }},
      {"grid.zmax", [&](auto& v, int l, auto& k) { c.grid.zmax = to_double(v, l, k); }},
      {"grid.stretch", [&](auto& v, int l, auto& k) { c.grid.stretch = to_double(v, l, k); }},
      {"sim.eps", [&](auto& v, int l, auto& k) { c.sim.eps = to_double(v, l, k); }},
      {"sim.alpha", [&](auto& v, int l, auto& k) { c.sim.alpha = to_double(v, l, k); }},
      {"sim.dt", [&](auto& v, int l, auto& k) { c.sim.dt = to_double(v, l, k); }},
      {"sim.tfinal", [&](auto& v, int l, auto& k) { c.sim.T = to_double(v, l, k); }},
      {"sim.dealias", [&](auto& v, int l, auto& k) { c.sim.dealias = to_bool(v, l, k); }},
      {"sim.sponge_start", [&](auto& v, int l, auto& k) { c.sim.sponge_start = to_double(v, l, k); }},
      {"sim.sponge_rate", [&](auto& v, int l, auto& k) { c.sim.sponge_rate = to_double(v, l, k); }},
      {"sim.diag_every", [&](auto& v, int l, auto& k) { c.sim.diag_every = static_cast<int>(to_int(v, l, k)); }},
      {"sim.m", [&](auto& v, int l, auto& k) { c.sim.m = static_cast<int>(to_int(v, l, k)); }},
      {"init.kind",
       [&](auto& v, int l, auto&) {
         try {
           c.init.kind = parse_init_kind(v);
         } catch (const InvalidArgument& e) {
           fail(l, e.what());
         }
       }},
      {"init.amplitude", [&](auto& v, int l, auto& k) { c.init.amplitude = to_double(v, l, k); }},
      {"init.seed",
       [&](auto& v, int l, auto& k) {
         const long long s = to_int(v, l, k);
         if (s < 0) fail(l, "init.seed must be nonnegative");
         c.init.seed = static_cast<unsigned long long>(s);
       }},
      {"sweep.eps_list",
       [&](auto& v, int l, auto& k) {
         c.eps_list.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) c.eps_list.push_back(to_double(trim(item), l, k));
       }},
  };

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) fail(lineno, "unknown key '" + key + "'");
    if (value.empty()) fail(lineno, "missing value for '" + key + "'");
    if (seen.count(key)) fail(lineno, "duplicate key '" + key + "'");
    seen[key] = lineno;
    it->second(value, lineno, key);
  }

  auto line_of = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys)
      if (auto it = seen.find(k); it != seen.end()) return it->second;
    return 0;
  };
  auto check = [&](bool ok, std::initializer_list<const char*> keys, const std::string& msg) {
    if (!ok) fail(line_of(keys), msg);
  };
  const auto& g = c.grid;
  check(g.n1 >= 8 && g.n1 % 2 == 0, {"grid.n1"}, "grid.n1 must be even and >= 8");
  check(g.n2 >= 8 && g.n2 % 2 == 0, {"grid.n2"}, "grid.n2 must be even and >= 8");
  check(g.nz >= 8, {"grid.nz"}, "grid.nz must be >= 8");
  check(g.l1 > 0 && g.l2 > 0, {"grid.l1", "grid.l2"}, "grid lengths must be positive");
  check(g.zmax > 0, {"grid.zmax"}, "grid.zmax must be positive");
  check(g.stretch >= 0 && g.stretch <= 50, {"grid.stretch"}, "grid.stretch must lie in [0, 50]");
  check(std::abs(c.sim.alpha) <= 1.0, {"sim.alpha"}, "|sim.alpha| must be <= 1");
  check(c.sim.eps >= 0 && c.sim.eps <= 1, {"sim.eps"}, "sim.eps must lie in [0, 1]");
  check(c.sim.dt > 0, {"sim.dt"}, "sim.dt must be positive");
  check(c.sim.T > 0, {"sim.tfinal"}, "sim.tfinal must be positive");
  check(c.sim.sponge_start < g.zmax, {"sim.sponge_start", "grid.zmax"}, "sim.sponge_start must be below grid.zmax");
  check(c.sim.sponge_rate >= 0, {"sim.sponge_rate"}, "sim.sponge_rate must be nonnegative");
  check(c.sim.diag_every >= 1, {"sim.diag_every"}, "sim.diag_every must be >= 1");
  check(c.sim.m >= 2 && c.sim.m <= kDefaultMaxOrder, {"sim.m"}, "sim.m must lie in [2, 4]");
  check(c.eps_list.size() >= 4, {"sweep.eps_list"}, "sweep.eps_list needs at least 4 entries");
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    check(c.eps_list[i] > 0 && c.eps_list[i] <= 1, {"sweep.eps_list"}, "sweep.eps_list entries must lie in (0, 1]");
    if (i > 0) check(c.eps_list[i] < c.eps_list[i - 1], {"sweep.eps_list"}, "sweep.eps_list must be strictly decreasing");
  }
  try {
    c.sim.grid = g.build();
    c.sim.validate();
  } catch (const InvalidArgument& e) {
    fail(line_of({"sim.tfinal", "sim.dt", "grid.nz"}), e.what());
  }
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidArgument("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const Config& c) {
  std::ostringstream o;
  o.precision(17);
  o << "grid.l1 = " << c.grid.l1 << "\ngrid.l2 = " << c.grid.l2 << "\ngrid.n1 = " << c.grid.n1
    << "\ngrid.n2 = " << c.grid.n2 << "\ngrid.nz = " << c.grid.nz << "\ngrid.zmax = " << c.grid.zmax
    << "\ngrid.stretch = " << c.grid.stretch << "\nsim.eps = " << c.sim.eps << "\nsim.alpha = " << c.sim.alpha
    << "\nsim.dt = " << c.sim.dt << "\nsim.tfinal = " << c.sim.T << "\nsim.dealias = " << (c.sim.dealias ? "true" : "false")
    << "\nsim.sponge_start = " << c.sim.sponge_start << "\nsim.sponge_rate = " << c.sim.sponge_rate
    << "\nsim.diag_every = " << c.sim.diag_every << "\nsim.m = " << c.sim.m << "\ninit.kind = " << to_string(c.init.kind)
    << "\ninit.amplitude = " << c.init.amplitude << "\ninit.seed = " << c.init.seed << "\nsweep.eps_list = ";
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) o << (i ? ", " : "") << c.eps_list[i];
  o << "\n";
  return o.str();
}

}  // namespace conslab
