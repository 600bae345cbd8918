#pragma once

// Command-line front end. Every option is held as a string so the effective
// configuration can be echoed verbatim and filled in from a config file.
// Precedence is flag, then config file, then environment, then default.

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "farey/asymptotics.hpp"
#include "farey/preimage_engine.hpp"
#include "farey/report.hpp"
#include "farey/stern_brocot.hpp"
#include "farey/transfer_operator.hpp"
#include "farey/verify.hpp"

namespace farey::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 2;
inline constexpr int kExitConfigError = 3;

/// Environment variable consulted for the default thread count.
inline constexpr const char* kThreadsEnv = "FAREY_THREADS";

/// Raised for malformed option values and unusable config files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct Param {
  std::string key;
  std::string fallback;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string description;
  std::vector<Param> params;
};

inline const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = [] {
    const Param threads{"threads", "1", "worker threads (default from FAREY_THREADS)"};
    const Param mesh{"mesh", std::to_string(kDefaultMeshNodes), "grid nodes G"};
    const Param xmin{"xmin", "1e-07", "left end of the geometric mesh"};
    const Param interp{"interp", "cubic", "grid interpolant: cubic or linear"};
    return std::vector<CommandSpec>{
        {"sumlevel",
         "measures or endpoints of the sum-level sets C_n^u",
         {{"n", "1..5", "n as a value, range a..b, or comma list"},
          {"u", "1/2", "left end u of [u,1]"},
          {"method", "sb", "sb, cf, preimage, transfer, or all (sb, cf and preimage compared)"},
          {"emit", "measure", "measure or set"},
          threads, mesh, xmin, interp}},
        {"preimage",
         "measure or interval set of F^{-depth}[alpha,beta]",
         {{"alpha", "1/2", "left endpoint"},
          {"beta", "1", "right endpoint"},
          {"depth", "0..10", "depth as a value, range or list"},
          {"mode", "exact", "exact, float or auto"},
          {"emit", "measure", "measure or set"},
          {"prefix", std::to_string(kDefaultPrefixDepth), "subtree split depth for threads"},
          threads}},
        {"stern-brocot",
         "fractions of one Stern-Brocot level",
         {{"level", "3", "level n"}, {"max-level", std::to_string(kDefaultMaxSternBrocotLevel), "materialization bound"}}},
        {"transfer",
         "grid iterates of the transfer operator",
         {{"u", "1/2", "left end u of [u,1]"},
          {"n", "20", "number of iterates K"},
          {"emit", "lambda", "lambda or gridfn"},
          {"exact-limit", "20", "compare with exact enumeration up to this n"},
          threads, mesh, xmin, interp}},
        {"asympt",
         "fit reports for the asymptotic laws",
         {{"law", "partial", "s, partial, pointwise, remainder, lemma3 or lemma4"},
          {"u", "1/2", "u for partial, and N = ceil(1/u) for s, remainder and lemma laws"},
          {"alpha", "1/2", "pointwise law: left endpoint"},
          {"beta", "1", "pointwise law: right endpoint"},
          {"grid", "1e2,1e3,1e4", "n or sigma values"},
          {"splice", "22", "last n taken from exact enumeration"},
          threads, mesh, xmin, interp}},
        {"verify",
         "self-check suites with a JSON report",
         {{"suite", "oracles", "oracles, lemmas, laws or all"}, threads, mesh, xmin, interp}},
    };
  }();
  return specs;
}

inline const CommandSpec& command_spec(const std::string& name) {
  for (const auto& s : command_specs()) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown command " + name);
}

/// The effective configuration of one run.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> values;
  std::string output;

  const std::string& at(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError("missing option " + key);
    return it->second;
  }

  /// "# farey <command> k=v ..." with keys sorted.
  std::string header() const {
    std::string s = "# farey " + command;
    for (const auto& [k, v] : values) s += " " + k + "=" + v;
    return s + "\n";
  }

  nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    for (const auto& [k, v] : values) j[k] = v;
    return j;
  }
};

// ---------------------------------------------------------------------------
// Value parsing

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline long long parse_int(const std::string& key, std::string_view text) {
  long long v = 0;
  const auto t = trim(text);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc{} || r.ptr != t.data() + t.size()) throw ConfigError(key + ": not an integer: '" + t + "'");
  return v;
}

inline double parse_double(const std::string& key, std::string_view text) {
  double v = 0.0;
  const auto t = trim(text);
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (r.ec != std::errc{} || r.ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": not a number: '" + t + "'");
  }
  return v;
}

/// "7", "1..20" or "2,5,9".
inline std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto a = parse_int(key, std::string_view(text).substr(0, dots));
    const auto b = parse_int(key, std::string_view(text).substr(dots + 2));
    if (b < a) throw ConfigError(key + ": empty range " + text);
    if (b - a > 1'000'000) throw ConfigError(key + ": range too long");
    for (long long v = a; v <= b; ++v) out.push_back(static_cast<int>(v));
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(static_cast<int>(parse_int(key, item)));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

inline std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

inline ExactRational parse_rational(const std::string& key, const std::string& text) {
  try {
    return ExactRational::parse(trim(text));
  } catch (const Error& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

inline unsigned parse_threads(const RunConfig& cfg) {
  const auto t = parse_int("threads", cfg.at("threads"));
  if (t < 1 || t > 1024) throw ConfigError("threads must lie in 1..1024");
  return static_cast<unsigned>(t);
}

inline MeshSpec parse_mesh(const RunConfig& cfg) {
  MeshSpec m;
  const auto g = parse_int("mesh", cfg.at("mesh"));
  if (g < 16 || g > (1 << 24)) throw ConfigError("mesh must lie in 16..16777216");
  m.nodes = static_cast<std::size_t>(g);
  m.x_min = parse_double("xmin", cfg.at("xmin"));
  if (!(m.x_min > 0.0 && m.x_min < 0.5)) throw ConfigError("xmin must lie in (0, 1/2)");
  const auto& i = cfg.at("interp");
  if (i == "cubic") {
    m.interpolation = Interpolation::monotone_cubic;
  } else if (i == "linear") {
    m.interpolation = Interpolation::linear;
  } else {
    throw ConfigError("interp must be cubic or linear");
  }
  return m;
}

inline std::string one_of(const RunConfig& cfg, const std::string& key, std::initializer_list<const char*> allowed) {
  const auto& v = cfg.at(key);
  std::string list;
  for (const char* a : allowed) {
    if (v == a) return v;
    list += list.empty() ? a : std::string(", ") + a;
  }
  throw ConfigError(key + " must be one of " + list);
}

/// Reads key=value lines; '#' starts a comment.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands. Each returns its exit code and appends its output to `out`.

inline std::string rational_or_blank(const std::optional<ExactRational>& q) { return q ? q->str() : std::string(); }

inline int cmd_sumlevel(const RunConfig& cfg, std::string& out) {
  const auto ns = parse_int_list("n", cfg.at("n"));
  const auto u = parse_rational("u", cfg.at("u"));
  const auto method = one_of(cfg, "method", {"sb", "cf", "preimage", "transfer", "all"});
  const auto emit = one_of(cfg, "emit", {"measure", "set"});
  EngineOptions engine;
  engine.threads = parse_threads(cfg);
  for (int n : ns) {
    if (n < 1) throw ConfigError("n must be >= 1");
  }
  if (u.sign() <= 0 || u >= ExactRational(1)) throw ConfigError("u must lie in (0,1)");
  const bool half = u == ExactRational(1, 2);
  if ((method == "sb" || method == "cf" || method == "all") && !half) {
    throw ConfigError("methods sb and cf construct C_n = C_n^{1/2} only; use --method preimage or transfer for other u");
  }
  const RationalInterval base(u, ExactRational(1));
  auto capacity = [](const std::string& hint, const CapacityExceeded& e) {
    const std::string msg = e.what();
    return CapacityExceeded(msg.find("stream") == std::string::npos ? msg + "; " + hint : msg);
  };

  if (emit == "set") {
    if (method == "transfer") throw ConfigError("--emit set needs an exact method (sb, cf, preimage or all)");
    out += "n,lo,hi\n";
    bool agree = true;
    for (int n : ns) {
      IntervalSet s;
      try {
        if (method == "sb") s = sumlevel_intervals_sb(n);
        if (method == "cf") s = sumlevel_intervals_cf(n);
        if (method == "preimage" || method == "all") {
          PreimageQuery q;
          q.base = base;
          q.depth = n - 1;
          q.emit = EmitMode::set;
          s = preimage_set(q, engine);
        }
        if (method == "all" && !(s == sumlevel_intervals_sb(n) && s == sumlevel_intervals_cf(n))) agree = false;
      } catch (const CapacityExceeded& e) {
        throw capacity("interval sets are materialized in full; use --emit measure for streaming measures", e);
      }
      for (const auto& I : s) out += std::to_string(n) + "," + I.lo().str() + "," + I.hi().str() + "\n";
    }
    return agree ? kExitOk : kExitVerificationFailed;
  }

  if (method == "transfer") {
    const int n_max = *std::max_element(ns.begin(), ns.end());
    const auto grid = sumlevel_measures_grid(u.to_double(), n_max, parse_mesh(cfg), engine.threads);
    out += "n,lambda,lambda_float,method\n";
    for (int n : ns) {
      const auto v = format_real(grid[static_cast<std::size_t>(n - 1)]);
      out += std::to_string(n) + "," + v + "," + v + ",transfer\n";
    }
    return kExitOk;
  }

  auto exact_by = [&](const std::string& m, int n) -> ExactRational {
    try {
      if (m == "sb") return sumlevel_measure_sb(n);
      if (m == "cf") return sumlevel_measure_cf(n);
    } catch (const CapacityExceeded& e) {
      throw capacity("use --method preimage, which streams without materializing the level", e);
    }
    PreimageQuery q;
    q.base = base;
    q.depth = n - 1;
    q.mode = ArithmeticMode::exact;
    return *preimage_measure(q, engine).lambda_exact;
  };
  const bool multi = method == "all";
  const std::vector<std::string> methods = multi ? std::vector<std::string>{"sb", "cf", "preimage"}
                                                 : std::vector<std::string>{method};
  out += multi ? "n,lambda,lambda_float,method,agree\n" : "n,lambda,lambda_float,method\n";
  bool all_agree = true;
  for (int n : ns) {
    std::vector<ExactRational> vals;
    for (const auto& m : methods) vals.push_back(exact_by(m, n));
    const bool agree = std::all_of(vals.begin(), vals.end(), [&](const ExactRational& v) { return v == vals.front(); });
    all_agree = all_agree && agree;
    for (std::size_t i = 0; i < methods.size(); ++i) {
      out += std::to_string(n) + "," + vals[i].str() + "," + format_real(vals[i].to_double()) + "," + methods[i];
      out += multi ? (agree ? ",true\n" : ",false\n") : "\n";
    }
  }
  return all_agree ? kExitOk : kExitVerificationFailed;
}

inline int cmd_preimage(const RunConfig& cfg, std::string& out) {
  const RationalInterval base(parse_rational("alpha", cfg.at("alpha")), parse_rational("beta", cfg.at("beta")));
  const auto depths = parse_int_list("depth", cfg.at("depth"));
  const auto mode_s = one_of(cfg, "mode", {"exact", "float", "auto"});
  const auto emit = one_of(cfg, "emit", {"measure", "set"});
  EngineOptions engine;
  engine.threads = parse_threads(cfg);
  const auto prefix = parse_int("prefix", cfg.at("prefix"));
  if (prefix < 0 || prefix > 20) throw ConfigError("prefix must lie in 0..20");
  engine.prefix_depth = static_cast<int>(prefix);
  const ArithmeticMode mode = mode_s == "exact" ? ArithmeticMode::exact
                              : mode_s == "float" ? ArithmeticMode::float64
                                                  : ArithmeticMode::automatic;
  for (int d : depths) {
    if (d < 0 || d > kMaxPreimageDepth) throw ConfigError("depth must lie in 0.." + std::to_string(kMaxPreimageDepth));
  }

  if (emit == "set") {
    out += "depth,lo,hi\n";
    for (int d : depths) {
      PreimageQuery q{base, d, mode, EmitMode::set};
      IntervalSet s;
      try {
        s = preimage_set(q, engine);
      } catch (const CapacityExceeded& e) {
        throw CapacityExceeded(std::string(e.what()) + "; use --emit measure for streaming enumeration");
      }
      for (const auto& I : s) out += std::to_string(d) + "," + I.lo().str() + "," + I.hi().str() + "\n";
    }
    return kExitOk;
  }

  out += "depth,lambda,mu,interval_count\n";
  std::string notes;
  for (int d : depths) {
    const auto r = preimage_measure(PreimageQuery{base, d, mode, EmitMode::measure}, engine);
    const std::string lambda = r.lambda_exact ? r.lambda_exact->str() : format_real(r.lambda);
    const std::string mu = r.mu ? format_real(*r.mu) : std::string();
    out += std::to_string(d) + "," + lambda + "," + mu + "," + std::to_string(r.interval_count) + "\n";
    if (!r.lambda_exact) {
      notes += "# depth=" + std::to_string(d) + " lambda_error_bound=" + format_real(r.lambda_error_bound) + "\n";
    }
  }
  out += notes;
  return kExitOk;
}

inline int cmd_stern_brocot(const RunConfig& cfg, std::string& out) {
  const auto level = parse_int("level", cfg.at("level"));
  const auto max_level = parse_int("max-level", cfg.at("max-level"));
  if (level < 0) throw ConfigError("level must be >= 0");
  const auto sb = sb_generate(static_cast<int>(level), static_cast<int>(max_level));
  out += "k,fraction\n";
  for (std::size_t k = 0; k < sb.fractions.size(); ++k) {
    out += std::to_string(k) + "," + sb.fractions[k].exact().str() + "\n";
  }
  return kExitOk;
}

inline int cmd_transfer(const RunConfig& cfg, std::string& out) {
  const auto u = parse_rational("u", cfg.at("u"));
  const auto K = parse_int("n", cfg.at("n"));
  const auto emit = one_of(cfg, "emit", {"lambda", "gridfn"});
  const auto exact_limit = parse_int("exact-limit", cfg.at("exact-limit"));
  const MeshSpec mesh = parse_mesh(cfg);
  const unsigned threads = parse_threads(cfg);
  if (K < 1 || K > 10'000'000) throw ConfigError("n must lie in 1..10000000");
  if (exact_limit < 0 || exact_limit > kDefaultExactDepthLimit + 1) {
    throw ConfigError("exact-limit must lie in 0.." + std::to_string(kDefaultExactDepthLimit + 1));
  }
  if (u.sign() <= 0 || u >= ExactRational(1)) throw ConfigError("u must lie in (0,1)");

  if (emit == "gridfn") {
    const auto mesh_ptr = make_mesh(mesh);
    const auto g = transfer_iterate_grid(phi0_on(mesh_ptr), static_cast<int>(K - 1), threads);
    out += "x,value\n";
    for (std::size_t i = 0; i < mesh_ptr->size(); ++i) {
      out += format_real((*mesh_ptr)[i]) + "," + format_real(g.values()[i]) + "\n";
    }
    return kExitOk;
  }

  const auto grid = sumlevel_measures_grid(u.to_double(), static_cast<int>(K), mesh, threads);
  EngineOptions engine;
  engine.threads = threads;
  out += "n,lambda_grid,lambda_exact,rel_err\n";
  for (long long n = 1; n <= K; ++n) {
    const double g = grid[static_cast<std::size_t>(n - 1)];
    out += std::to_string(n) + "," + format_real(g);
    if (n <= exact_limit) {
      PreimageQuery q;
      q.base = RationalInterval(u, ExactRational(1));
      q.depth = static_cast<int>(n - 1);
      q.mode = ArithmeticMode::exact;
      const auto r = preimage_measure(q, engine);
      out += "," + r.lambda_exact->str() + "," + format_real(std::abs(g - r.lambda) / r.lambda) + "\n";
    } else {
      out += ",,\n";
    }
  }
  return kExitOk;
}

inline std::uint64_t n_from_u(const ExactRational& u) {
  const mpz_class q = u.den(), p = u.num();
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
  if (!c.fits_ulong_p() || c < 2) throw ConfigError("u must give N = ceil(1/u) >= 2");
  return c.get_ui();
}

inline int cmd_asympt(const RunConfig& cfg, std::string& out) {
  const auto law = one_of(cfg, "law", {"s", "partial", "pointwise", "remainder", "lemma3", "lemma4"});
  const auto grid = parse_double_list("grid", cfg.at("grid"));
  LawOptions opt;
  opt.mesh = parse_mesh(cfg);
  opt.engine.threads = parse_threads(cfg);
  const auto splice = parse_int("splice", cfg.at("splice"));
  if (splice < -1 || splice > kDefaultExactDepthLimit) {
    throw ConfigError("splice must lie in -1.." + std::to_string(kDefaultExactDepthLimit));
  }
  opt.splice = static_cast<int>(splice);
  for (double g : grid) {
    if (!(g >= 1.0 && g <= 1e7)) throw ConfigError("grid values must lie in [1, 1e7]");
  }
  const auto u = parse_rational("u", cfg.at("u"));
  if (u.sign() <= 0 || u >= ExactRational(1)) throw ConfigError("u must lie in (0,1)");

  FitReport r;
  if (law == "s") r = s_law_fit(n_from_u(u), grid, opt);
  if (law == "partial") r = partial_sum_law_fit(u, grid, opt);
  if (law == "pointwise") {
    r = pointwise_law_fit(parse_rational("alpha", cfg.at("alpha")), parse_rational("beta", cfg.at("beta")), grid, opt);
  }
  if (law == "remainder") r = remainder_fit(n_from_u(u), grid, opt);
  if (law == "lemma3") r = lemma_fit(3, n_from_u(u), grid);
  if (law == "lemma4") r = lemma_fit(4, n_from_u(u), grid);
  out += json_with_config(cfg.json(), to_json(r));
  return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, std::string& out) {
  VerifyOptions opt;
  opt.mesh = parse_mesh(cfg);
  opt.engine.threads = parse_threads(cfg);
  const auto checks = run_suite(parse_suite(cfg.at("suite")), opt);
  nlohmann::ordered_json body;
  std::size_t failed = 0;
  body["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    body["checks"].push_back(to_json(c));
    if (!c.passed) ++failed;
  }
  body["total"] = checks.size();
  body["failed"] = failed;
  body["passed"] = failed == 0;
  out += json_with_config(cfg.json(), body);
  return failed == 0 ? kExitOk : kExitVerificationFailed;
}

inline bool is_json_command(const std::string& command) { return command == "asympt" || command == "verify"; }

inline int dispatch(const RunConfig& cfg, std::string& out) {
  if (!is_json_command(cfg.command)) out += cfg.header();
  if (cfg.command == "sumlevel") return cmd_sumlevel(cfg, out);
  if (cfg.command == "preimage") return cmd_preimage(cfg, out);
  if (cfg.command == "stern-brocot") return cmd_stern_brocot(cfg, out);
  if (cfg.command == "transfer") return cmd_transfer(cfg, out);
  if (cfg.command == "asympt") return cmd_asympt(cfg, out);
  if (cfg.command == "verify") return cmd_verify(cfg, out);
  throw ConfigError("unknown command " + cfg.command);
}

// ---------------------------------------------------------------------------
// Entry point

/// Parses argv, resolves the configuration and runs one command. `env` looks up
/// environment variables and is injectable for tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
               const std::function<const char*(const char*)>& env = [](const char* k) { return std::getenv(k); }) {
  CLI::App app{"Farey map sum-level sets, transfer operator and asymptotic laws", "farey"};
  app.require_subcommand(1);
  std::string config_path, output_path;
  app.add_option("--config", config_path, "key=value file; explicit flags override it");
  app.add_option("--output", output_path, "write to this file instead of standard output");

  std::map<std::string, std::map<std::string, std::string>> given;
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::map<std::string, CLI::Option*>> opts;
  for (const auto& spec : command_specs()) {
    CLI::App* sub = app.add_subcommand(spec.name, spec.description);
    subs[spec.name] = sub;
    for (const auto& p : spec.params) {
      opts[spec.name][p.key] = sub->add_option("--" + p.key, given[spec.name][p.key], p.help + " [" + p.fallback + "]");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    RunConfig cfg;
    for (const auto& [name, sub] : subs) {
      if (sub->parsed()) cfg.command = name;
    }
    const auto& spec = command_spec(cfg.command);

    std::map<std::string, std::string> file;
    if (!config_path.empty()) {
      file = read_config_file(config_path);
      std::set<std::string> known{"output"};
      for (const auto& s : command_specs()) {
        for (const auto& p : s.params) known.insert(p.key);
      }
      for (const auto& [k, v] : file) {
        if (!known.count(k)) throw ConfigError("config file " + config_path + ": unknown key " + k);
      }
    }
    for (const auto& p : spec.params) {
      std::string value = p.fallback;
      if (p.key == "threads") {
        if (const char* e = env(kThreadsEnv); e != nullptr && *e != '\0') value = e;
      }
      if (const auto it = file.find(p.key); it != file.end()) value = it->second;
      if (opts[cfg.command][p.key]->count() > 0) value = given[cfg.command][p.key];
      cfg.values[p.key] = value;
    }
    cfg.output = output_path;
    if (cfg.output.empty()) {
      if (const auto it = file.find("output"); it != file.end()) cfg.output = it->second;
    }

    std::string text;
    const int code = dispatch(cfg, text);
    if (cfg.output.empty()) {
      out << text;
    } else {
      std::ofstream f(cfg.output, std::ios::binary);
      if (!f) throw ConfigError("cannot open output file " + cfg.output);
      f << text;
      if (!f) throw ConfigError("write failed for " + cfg.output);
    }
    if (code == kExitVerificationFailed) err << "farey: verification failed\n";
    return code;
  } catch (const Error& e) {
    err << "farey: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace farey::cli
