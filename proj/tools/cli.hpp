#pragma once

// Command-line front end. run_cli is separate from main so tests can drive it
// with in-memory streams.

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "divcorr/divcorr.hpp"
#include "report.hpp"

namespace divcorr::cli {

using report::Json;

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int domain = 2;
inline constexpr int resource = 3;
}  // namespace exit_code

// Flags in the order they are echoed under "params".
inline const std::vector<std::string> kFlagOrder = {"name", "f",  "z", "fz", "chi-mod", "chi-index", "x", "a",
                                                    "h",    "r",  "u", "v",  "K",       "N",         "k", "y",
                                                    "w",    "R",  "D", "P",  "sign"};

inline const std::vector<std::string> kCommonFlags = {"mode", "output", "threads", "out"};

struct Command {
  std::string name;
  std::string help;
  std::vector<std::string> flags;
};

inline const std::vector<Command>& commands() {
  static const std::vector<Command> cmds = {
      {"sieve", "tabulate a multiplicative function up to x", {"f", "z", "chi-mod", "chi-index", "x"}},
      {"identity-hb", "verify the Heath-Brown type identity for tau_{r +- u/v}", {"r", "u", "v", "K", "N", "x", "sign"}},
      {"identity-linnik", "verify the Linnik type identity for f^(*z)", {"f", "fz", "chi-mod", "chi-index", "z", "K", "x"}},
      {"friable", "classify y-friable n <= x by the friable factorization", {"f", "z", "chi-mod", "chi-index", "x", "y", "w"}},
      {"correlate", "D_f, M_f and Sigma_f for sum f(n) tau(a n - h)", {"f", "z", "chi-mod", "chi-index", "x", "a", "h", "R", "D"}},
      {"main-term", "main term M_f(x; a, h) with per-character partials", {"f", "z", "chi-mod", "chi-index", "x", "a", "h", "D"}},
      {"sigma-scan", "Sigma_f over (x/2, x] for R = 1, 2, 4, ... up to R", {"f", "z", "chi-mod", "chi-index", "x", "a", "h", "R"}},
      {"omega-correlate", "divisor correlation split by omega(n)", {"x", "h", "k", "z"}},
      {"constants", "leading constants as truncated Euler products", {"name", "h", "P", "z", "k"}},
  };
  return cmds;
}

class Args {
 public:
  Args(std::string command, std::map<std::string, std::string> raw) : command_(std::move(command)), raw_(std::move(raw)) {}

  const std::string& command() const { return command_; }
  bool has(const std::string& k) const { return raw_.count(k) != 0; }

  std::string str(const std::string& k, const std::string& fallback) const {
    const auto it = raw_.find(k);
    return it == raw_.end() ? fallback : it->second;
  }

  std::int64_t i64(const std::string& k, std::optional<std::int64_t> fallback = std::nullopt) const {
    const auto it = raw_.find(k);
    if (it == raw_.end()) {
      if (!fallback) throw DomainError("--" + k + " is required");
      return *fallback;
    }
    std::int64_t v = 0;
    const auto& s = it->second;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw DomainError("--" + k + ": expected an integer, got '" + s + "'");
    }
    return v;
  }

  std::uint64_t u64(const std::string& k, std::optional<std::uint64_t> fallback = std::nullopt) const {
    if (!has(k)) {
      if (!fallback) throw DomainError("--" + k + " is required");
      return *fallback;
    }
    const std::int64_t v = i64(k);
    if (v < 0) throw DomainError("--" + k + " must be nonnegative, got " + raw_.at(k));
    return static_cast<std::uint64_t>(v);
  }

  int small_int(const std::string& k, int fallback) const {
    const std::int64_t v = i64(k, fallback);
    if (v < -1000000 || v > 1000000) throw DomainError("--" + k + " out of range");
    return static_cast<int>(v);
  }

  ZParam z(const std::string& k, const std::string& fallback) const { return ZParam::parse(str(k, fallback)); }

  Json params() const {
    Json j = Json::object();
    for (const auto& k : kFlagOrder) {
      if (has(k)) j[k] = raw_.at(k);
    }
    return j;
  }

 private:
  std::string command_;
  std::map<std::string, std::string> raw_;
};

inline DirichletCharacter character_arg(const Args& args) {
  const std::uint64_t q = args.u64("chi-mod", 1);
  if (q == 0 || q > 1000000) throw DomainError("--chi-mod must lie in [1, 10^6]");
  const std::uint64_t idx = args.u64("chi-index", 0);
  const CharGroup group = character_group(q);
  if (idx >= group.size()) {
    throw DomainError("--chi-index " + std::to_string(idx) + " out of range for modulus " + std::to_string(q) + " (" +
                      std::to_string(group.size()) + " characters)");
  }
  return group[idx];
}

inline FunctionSpec function_arg(const Args& args, const std::string& zkey, const std::string& default_kind) {
  const std::string kind = args.str("f", default_kind);
  if (kind != "tau-z-chi" && (args.has("chi-mod") || args.has("chi-index"))) {
    throw DomainError("--chi-mod/--chi-index apply only to --f tau-z-chi");
  }
  if (kind == "tau-z") return FunctionSpec::tau_z(args.z(zkey, "1"));
  if (kind == "tau-z-chi") return FunctionSpec::tau_z_twisted(args.z(zkey, "1"), character_arg(args));
  if (kind == "zpow-omega") return FunctionSpec::zpow_omega(args.z(zkey, "1"));
  if (kind == "mobius") return FunctionSpec::tau_z(ZParam::rational(-1));
  if (kind == "two-squares") return FunctionSpec::two_squares();
  throw DomainError("--f must be one of tau-z, tau-z-chi, zpow-omega, two-squares, mobius; got '" + kind + "'");
}

// Calls fn.template operator()<S>() with S chosen by the runtime mode.
template <class Fn>
auto with_mode(Mode mode, Fn&& fn) {
  if (mode == Mode::Exact) return fn.template operator()<Rational>();
  return fn.template operator()<Complex>();
}

struct Context {
  Args args;
  Mode mode;
  std::string output;
  unsigned threads;
};

// Result of a command: a JSON payload plus optional tabular rows and a raw writer.
struct Outcome {
  Json result;
  std::optional<Json> rows;  // preferred CSV form when present
  std::function<void(std::ostream&, const std::string&)> raw;  // sieve tables
};

inline Outcome run_sieve(const Context& c) {
  const auto f = function_arg(c.args, "z", "tau-z");
  const std::uint64_t x = c.args.u64("x");
  if (x >= UINT32_MAX) throw ResourceError("sieve limit exceeds 32 bits", x);
  const FactorTable table(std::max<std::uint64_t>(x, 2));
  auto any = std::make_shared<AnyValueTable>(sieve_multiplicative(f, x, table, c.mode, c.threads));
  Outcome o;
  std::ostringstream digest;
  digest << std::hex << std::setw(16) << std::setfill('0') << spec_digest(f);
  o.result = Json{{"spec", f.describe()}, {"digest", digest.str()}, {"limit", x}};
  if (c.output == "json") {
    Json values = Json::array();
    std::visit([&](const auto& t) {
      for (std::uint64_t n = 1; n <= t.limit; ++n) values.push_back(report::scalar(t.values[n]));
    }, *any);
    o.result["values"] = std::move(values);
  }
  o.raw = [any](std::ostream& os, const std::string& format) {
    std::visit([&](const auto& t) {
      if (format == "bin") {
        write_table_binary(os, t);
      } else {
        write_table_csv(os, t);
      }
    }, *any);
  };
  return o;
}

inline Outcome run_identity_hb(const Context& c) {
  const int r = c.args.small_int("r", 0), u = c.args.small_int("u", 1), v = c.args.small_int("v", 2);
  const int K = c.args.small_int("K", 3);
  const std::string sign = c.args.str("sign", "pos");
  if (sign != "pos" && sign != "neg") throw DomainError("--sign must be pos or neg, got '" + sign + "'");
  Outcome o;
  if (c.args.has("N")) {
    // Coefficient listing only.
    o.result = Json{{"coefficients", report::coefficients(hb_coefficients(K, c.args.small_int("N", 0), u, v))}};
    return o;
  }
  const std::uint64_t x = c.args.u64("x", 10000);
  const HBSign s = sign == "pos" ? HBSign::Positive : HBSign::Negative;
  const auto rep = with_mode(c.mode, [&]<Scalar S>() { return hb_verify<S>(r, u, v, K, x, s, c.threads); });
  o.result = report::identity(rep);
  const int N = s == HBSign::Positive ? 0 : r - 1;
  o.result["coefficients"] = report::coefficients(hb_coefficients(K, N, u, v));
  return o;
}

inline Outcome run_identity_linnik(const Context& c) {
  const auto f = function_arg(c.args, "fz", "tau-z-chi");
  const ZParam z = c.args.z("z", "1/2");
  const int K = c.args.small_int("K", 2);
  const std::uint64_t x = c.args.u64("x", 10000);
  const auto rep = with_mode(c.mode, [&]<Scalar S>() { return linnik_verify<S>(f, z, K, x, c.threads); });
  Outcome o;
  o.result = report::identity(rep);
  Json coeffs = Json::array();
  with_mode(c.mode, [&]<Scalar S>() {
    for (const auto& v : linnik_coefficients(z.as<S>(), K)) coeffs.push_back(report::scalar(v));
    return 0;
  });
  o.result["coefficients"] = coeffs;
  return o;
}

inline Outcome run_friable(const Context& c) {
  const auto f = function_arg(c.args, "z", "tau-z");
  const std::uint64_t x = c.args.u64("x"), y = c.args.u64("y"), w = c.args.u64("w");
  if (x >= UINT32_MAX) throw ResourceError("friable limit exceeds 32 bits", x);
  Outcome o;
  o.result = with_mode(c.mode, [&]<Scalar S>() {
    const std::vector<S> ones(x + 1, from_int<S>(1));
    return report::friable(friable_decomposition_report<S>(f, ones, y, w, x));
  });
  return o;
}

inline std::uint64_t default_R(std::uint64_t x, std::uint64_t a) { return isqrt(a * x) + 1; }

inline Outcome run_correlate(const Context& c) {
  const auto f = function_arg(c.args, "z", "tau-z");
  const std::uint64_t x = c.args.u64("x"), a = c.args.u64("a", 1);
  const std::int64_t h = c.args.i64("h", 1);
  if (a == 0 || a > UINT32_MAX) throw DomainError("--a must lie in [1, 2^32)");
  const std::uint64_t R = c.args.u64("R", default_R(x, a));
  const std::uint64_t D = c.args.u64("D", f.class_modulus());
  Outcome o;
  o.result = with_mode(c.mode, [&]<Scalar S>() {
    return report::correlation(correlation_report<S>(f, x, a, h, R, D, c.threads));
  });
  return o;
}

inline Outcome run_main_term(const Context& c) {
  const auto f = function_arg(c.args, "z", "tau-z");
  const std::uint64_t x = c.args.u64("x"), a = c.args.u64("a", 1);
  const std::int64_t h = c.args.i64("h", 1);
  const std::uint64_t D = c.args.u64("D", f.class_modulus());
  Outcome o;
  o.result = with_mode(c.mode, [&]<Scalar S>() {
    const auto mt = main_term<S>(f, x, a, h, D, c.threads);
    return Json{{"m_value", report::scalar(mt.value)}, {"m_partials", report::partials(mt.partials)}};
  });
  return o;
}

inline Outcome run_sigma_scan(const Context& c) {
  const auto f = function_arg(c.args, "z", "tau-z");
  const std::uint64_t x = c.args.u64("x"), a = c.args.u64("a", 1);
  const std::int64_t h = c.args.i64("h", 1);
  const std::uint64_t Rmax = c.args.u64("R", 16);
  if (Rmax < 1) throw DomainError("--R must be positive");
  if (a == 0) throw DomainError("--a must be positive");
  std::uint64_t lo = x / 2;
  while (static_cast<std::int64_t>(a * (lo + 1)) - h < 1) ++lo;
  if (lo >= x) throw DomainError("interval (x/2, x] contains no n with a n - h >= 1");
  std::vector<std::uint64_t> Rs;
  for (std::uint64_t R = 1; R < Rmax; R *= 2) Rs.push_back(R);
  Rs.push_back(Rmax);
  Outcome o;
  Json rows = Json::array();
  with_mode(c.mode, [&]<Scalar S>() {
    for (const auto R : Rs) {
      const S s = sigma_f<S>(f, lo, x, a, h, R, c.threads);
      rows.push_back(Json{{"R", R}, {"sigma_value", report::scalar(s)},
                          {"normalized", magnitude(s) / static_cast<double>(x)}});
    }
    return 0;
  });
  o.result = Json{{"interval", Json{{"lo", lo}, {"hi", x}}}, {"rows", rows}};
  o.rows = rows;
  return o;
}

inline Outcome run_omega_correlate(const Context& c) {
  const std::uint64_t x = c.args.u64("x");
  const std::int64_t h = c.args.i64("h", 1);
  Outcome o;
  o.result = with_mode(c.mode, [&]<Scalar S>() {
    Json j = Json::object();
    if (c.args.has("k")) {
      const auto k = c.args.u64("k");
      if (k > 64) throw DomainError("--k must be at most 64");
      j["k"] = k;
      j["value"] = report::scalar(correlation_by_omega<S>(x, h, static_cast<unsigned>(k)));
    }
    if (c.args.has("z")) {
      j["z"] = c.args.str("z", "");
      j["xi"] = report::scalar(xi_polynomial<S>(x, h, c.args.z("z", "1").template as<S>()));
    }
    if (!c.args.has("k") && !c.args.has("z")) {
      // omega(n) <= 15 for n < 2^64.
      Json rows = Json::array();
      S total = from_int<S>(0);
      for (unsigned k = 0; k <= 15; ++k) {
        const S v = correlation_by_omega<S>(x, h, k);
        total += v;
        rows.push_back(Json{{"k", k}, {"value", report::scalar(v)}});
      }
      j["rows"] = rows;
      j["total"] = report::scalar(total);
      j["divisor_correlation"] = report::scalar(
          divisor_correlation<S>(FunctionSpec::tau_z(ZParam::rational(1)), x, 1, h, c.threads));
      o.rows = rows;
    }
    return j;
  });
  return o;
}

inline Outcome run_constants(const Context& c) {
  if (c.mode == Mode::Exact) throw ModeError("constants are evaluated in float mode only");
  const std::string name = c.args.str("name", "");
  const std::int64_t h = c.args.i64("h", 1);
  const std::uint64_t P = c.args.u64("P", 100000);
  if (P > 200000000) throw ResourceError("prime cutoff too large", P);
  Outcome o;
  if (name == "titchmarsh") {
    o.result = report::euler("C_h", titchmarsh_constants(h, P).c_h);
  } else if (name == "titchmarsh-prime") {
    o.result = report::euler("C_h_prime", titchmarsh_constants(h, P).c_h_prime);
  } else if (name == "lambda") {
    o.result = report::euler("lambda_h0", lambda_h0(c.args.z("z", "2"), h, P));
  } else if (name == "two-squares") {
    o.result = report::euler("beta_h0", two_squares_coeff(h, P));
  } else if (name == "landau-ramanujan") {
    o.result = report::euler("B_0", landau_ramanujan(P));
  } else if (name == "omega-k") {
    const auto k = c.args.u64("k", 1);
    if (k == 0 || k > 64) throw DomainError("--k must lie in [1, 64]");
    o.result = report::euler("omega_k", omega_k_coefficient(h, static_cast<unsigned>(k), P));
  } else {
    throw DomainError(
        "--name must be one of titchmarsh, titchmarsh-prime, lambda, two-squares, landau-ramanujan, omega-k; got '" +
        name + "'");
  }
  return o;
}

inline Outcome dispatch(const Context& c) {
  const auto& cmd = c.args.command();
  if (cmd == "sieve") return run_sieve(c);
  if (cmd == "identity-hb") return run_identity_hb(c);
  if (cmd == "identity-linnik") return run_identity_linnik(c);
  if (cmd == "friable") return run_friable(c);
  if (cmd == "correlate") return run_correlate(c);
  if (cmd == "main-term") return run_main_term(c);
  if (cmd == "sigma-scan") return run_sigma_scan(c);
  if (cmd == "omega-correlate") return run_omega_correlate(c);
  if (cmd == "constants") return run_constants(c);
  throw InternalError("unhandled command " + cmd);
}

inline void render(std::ostream& os, const Context& c, const Outcome& o) {
  if (c.output == "bin" || (c.output == "csv" && o.raw)) {
    o.raw(os, c.output);
    return;
  }
  Json doc{{"command", c.args.command()}, {"params", c.args.params()}, {"mode", mode_name(c.mode)}, {"result", o.result}};
  if (c.output == "json") {
    os << doc.dump(2) << '\n';
  } else if (o.rows) {
    report::csv_table(os, *o.rows);
  } else {
    os << "key,value\n";
    report::csv_flatten(os, doc, "");
  }
}

// "--flag value" pairs become "--flag=value" so values with a leading '-'
// (negative shifts, z = -1/2) are never mistaken for options.
inline std::vector<std::string> join_values(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& a = args[i];
    const bool long_flag = a.size() > 2 && a.rfind("--", 0) == 0 && a.find('=') == std::string::npos;
    if (long_flag && a != "--help" && i + 1 < args.size() && args[i + 1].rfind("--", 0) != 0) {
      out.push_back(a + "=" + args[i + 1]);
      ++i;
    } else {
      out.push_back(a);
    }
  }
  return out;
}

// args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"divcorr: divisor correlations, identities and constants", "divcorr"};
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  std::map<std::string, std::string> raw;
  std::string chosen;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->callback([&chosen, name = cmd.name] { chosen = name; });
    std::vector<std::string> flags = cmd.flags;
    flags.insert(flags.end(), kCommonFlags.begin(), kCommonFlags.end());
    for (const auto& flag : flags) {
      sub->add_option_function<std::string>("--" + flag, [&raw, flag](const std::string& v) { raw[flag] = v; });
    }
  }

  std::vector<std::string> reversed = join_values(args);
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    err << "divcorr: error: " << e.what() << '\n';
    return exit_code::domain;
  }

  try {
    Args parsed(chosen, raw);
    const std::string output = parsed.str("output", "json");
    if (output != "json" && output != "csv" && output != "bin") {
      throw DomainError("--output must be json, csv or bin; got '" + output + "'");
    }
    if (output == "bin" && chosen != "sieve") throw DomainError("--output bin is only available for sieve");
    const std::int64_t threads = parsed.i64("threads", default_threads());
    if (threads < 1 || threads > 1024) throw DomainError("--threads must lie in [1, 1024]");
    const Context ctx{parsed, parse_mode(parsed.str("mode", "float")), output, static_cast<unsigned>(threads)};
    const Outcome outcome = dispatch(ctx);
    if (parsed.has("out")) {
      std::ofstream file(parsed.str("out", ""), std::ios::binary);
      if (!file) throw DomainError("cannot open output file '" + parsed.str("out", "") + "'");
      render(file, ctx, outcome);
      if (!file.flush()) throw ResourceError("write to output file failed", 0);
    } else {
      render(out, ctx, outcome);
    }
    return exit_code::ok;
  } catch (const DomainError& e) {
    err << "divcorr: error: " << e.what() << '\n';
    return exit_code::domain;
  } catch (const ResourceError& e) {
    err << "divcorr: resource error: " << e.what() << '\n';
    return exit_code::resource;
  } catch (const std::bad_alloc&) {
    err << "divcorr: resource error: out of memory\n";
    return exit_code::resource;
  } catch (const std::exception& e) {
    err << "divcorr: internal error: " << e.what() << '\n';
    return exit_code::internal;
  }
}

}  // namespace divcorr::cli
