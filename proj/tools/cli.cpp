#include "cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "pgkex/arith.hpp"
#include "pgkex/attacks.hpp"
#include "pgkex/automorphism.hpp"
#include "pgkex/oracle.hpp"
#include "pgkex/protocols.hpp"
#include "pgkex/structure.hpp"
#include "pgkex/wire.hpp"

namespace pgkex::cli {

namespace {

using nlohmann::ordered_json;

// Enumeration-backed structure reports stay below this order.
constexpr std::uint64_t kInfoEnumerationBound = 100'000;

struct Globals {
  std::string params = "3,2,4";
  std::uint64_t seed = 0;
  bool json = false;
};

GroupParams parse_params(const std::string& text) {
  std::stringstream ss(text);
  std::string tok;
  std::vector<std::uint64_t> v;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoull(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::logic_error&) {
      throw Error(ErrorKind::ParseError, "bad --params '" + text + "'");
    }
  }
  if (v.size() != 3) throw Error(ErrorKind::ParseError, "--params expects p,m,n");
  return GroupParams::make(v[0], static_cast<unsigned>(v[1]), static_cast<unsigned>(v[2]));
}

/// Full form `p,m,n:e0,...` or bare exponents under --params.
Element parse_element(const std::string& text, const GroupParams& params) {
  if (text.find(':') != std::string::npos) return Element::parse(text);
  return Element::parse(params.to_string() + ":" + text);
}

unsigned log_p(std::uint64_t size, std::uint64_t p) { return arith::valuation(size, p, 64); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text << '\n';
}

// Aligned `key  value` lines, or one JSON object.
class Report {
 public:
  explicit Report(bool json) : json_(json) {}

  template <class T>
  Report& add(const std::string& key, const T& value) {
    j_[key] = value;
    std::ostringstream ss;
    if constexpr (std::is_same_v<T, bool>) {
      ss << (value ? "true" : "false");
    } else {
      ss << value;
    }
    lines_.emplace_back(key, ss.str());
    return *this;
  }
  Report& add(const std::string& key, const Element& g) { return add(key, g.to_string()); }

  void print(std::ostream& out) const {
    if (json_) {
      out << j_.dump(2) << '\n';
      return;
    }
    std::size_t width = 0;
    for (const auto& [k, v] : lines_) width = std::max(width, k.size());
    for (const auto& [k, v] : lines_) out << k << std::string(width + 2 - k.size(), ' ') << v << '\n';
  }

 private:
  bool json_;
  ordered_json j_;
  std::vector<std::pair<std::string, std::string>> lines_;
};

std::string power_text(std::uint64_t p, unsigned e) {
  std::string out = std::to_string(p) + "^" + std::to_string(e);
  if (const auto v = arith::checked_pow(p, e)) out += " = " + std::to_string(*v);
  return out;
}

// ------------------------------------------------------------ commands

int group_info(const Globals& g, std::ostream& out) {
  const GroupParams P = parse_params(g.params);
  const std::uint64_t p = P.p();
  const unsigned n = P.n();
  const unsigned m = P.m();
  unsigned z_log = m + n - 2;
  unsigned d_log = n - 1;
  unsigned f_log = P.order_log() - n;
  std::string method = "formula";
  if (P.order() && *P.order() <= kInfoEnumerationBound) {
    z_log = log_p(oracle::enumerate_center(P).size(), p);
    d_log = log_p(oracle::enumerate_derived(P).size(), p);
    f_log = log_p(oracle::frattini_by_maximal_subgroups(P).size(), p);
    method = "enumeration";
  }
  const unsigned a_log = m + n - 2;
  const unsigned b_log = n * (n - 1);
  if (g.json) {
    ordered_json j;
    j["params"] = {p, m, n};
    j["order_log"] = P.order_log();
    j["center_log"] = z_log;
    j["derived_log"] = d_log;
    j["frattini_log"] = f_log;
    j["aut_c_log"] = a_log + b_log;
    j["method"] = method;
    out << j.dump(2) << '\n';
    return 0;
  }
  Report r(false);
  r.add("group", "G_" + std::to_string(n) + "(" + std::to_string(m) + "," + std::to_string(p) + ")")
      .add("|G|", power_text(p, P.order_log()))
      .add("|Z(G)|", power_text(p, z_log))
      .add("|G'|", power_text(p, d_log))
      .add("|Phi(G)|", power_text(p, f_log))
      .add("|A|", power_text(p, a_log))
      .add("|B|", power_text(p, b_log))
      .add("|Aut_c|", power_text(p, a_log + b_log))
      .add("method", method);
  r.print(out);
  return 0;
}

int kex1_demo(const Globals& g, const std::string& family_text, const std::string& out_path, std::ostream& out) {
  const GroupParams P = parse_params(g.params);
  const AutFamily family = parse_family(family_text);
  Rng rng(g.seed);
  const Kex1Run run = kex1_run(P, family, rng);
  if (!out_path.empty()) write_file(out_path, to_json(run.transcript));
  const bool agree = run.alice_key == run.bob_key;
  Report r(g.json);
  r.add("protocol", "kex1")
      .add("family", std::string(family_name(family)))
      .add("g", run.transcript.g)
      .add("msg_a", run.transcript.msg_a)
      .add("msg_b", run.transcript.msg_b)
      .add("alice_key", run.alice_key)
      .add("bob_key", run.bob_key)
      .add("agree", agree);
  r.print(out);
  return agree ? 0 : 1;
}

int kex2_demo(const Globals& g, const std::string& family_text, const std::string& out_path, std::ostream& out) {
  const GroupParams P = parse_params(g.params);
  const AutFamily family = parse_family(family_text);
  Rng rng(g.seed);
  const Kex2Run run = kex2_run(P, family, rng);
  if (!out_path.empty()) write_file(out_path, to_json(run.transcript));
  const bool agree = run.alice_key == run.bob_key;
  Report r(g.json);
  r.add("protocol", "kex2")
      .add("family", std::string(family_name(family)))
      .add("u1", run.transcript.u1)
      .add("u2", run.transcript.u2)
      .add("u3", run.transcript.u3)
      .add("alice_key", run.alice_key)
      .add("bob_key", run.bob_key)
      .add("agree", agree);
  r.print(out);
  return agree ? 0 : 1;
}

int sign_cmd(const Globals& g, const std::string& message, const std::string& out_path, std::ostream& out) {
  const GroupParams P = parse_params(g.params);
  Rng rng(g.seed);
  const SigningKey key = keygen(P, rng);
  const Element x = message.empty() ? sample_element(P, rng) : parse_element(message, P);
  const Signature sig = sign(key.alpha, key.a, x, rng);
  const SigTranscript t{P, key.alpha, key.beta, sig};
  if (!out_path.empty()) write_file(out_path, to_json(t));
  const bool ok = verify(key.alpha, key.beta, sig);
  Report r(g.json);
  r.add("alpha", key.alpha).add("beta", key.beta).add("x", sig.x).add("s", sig.s).add("valid", ok);
  r.print(out);
  return ok ? 0 : 1;
}

int verify_cmd(const Globals& g, const std::string& path, std::ostream& out) {
  const AnyTranscript any = transcript_from_json(read_file(path));
  const auto* t = std::get_if<SigTranscript>(&any);
  if (!t) throw Error(ErrorKind::BadJson, "not a signature transcript");
  const bool ok = verify(t->alpha, t->beta, t->sig);
  Report r(g.json);
  r.add("valid", ok);
  r.print(out);
  return ok ? 0 : 1;
}

struct AttackOptions {
  std::string transcript;
  std::string key;
  std::string family = "A";
};

int print_attack(const Globals& g, const AttackReport& report, std::ostream& out) {
  if (g.json) {
    out << to_json(report) << '\n';
  } else {
    Report r(false);
    r.add("method", std::string(method_name(report.method)));
    if (const auto* k = std::get_if<Element>(&report.recovered_key)) {
      r.add("recovered_key", *k);
    } else {
      r.add("recovered_key", std::get<std::uint64_t>(report.recovered_key));
    }
    r.add("succeeded", report.succeeded);
    r.print(out);
  }
  return report.succeeded ? 0 : 1;
}

// Certification key for a transcript read from disk.
Element truth_from(const AttackOptions& o, const GroupParams& P) {
  if (o.key.empty()) throw Error(ErrorKind::NotApplicable, "--key is required to certify a transcript from file");
  return parse_element(o.key, P);
}

int attack_kex1(const Globals& g, const AttackOptions& o, bool a_side, std::ostream& out) {
  const AutFamily family = a_side ? parse_family(o.family) : AutFamily::B;
  auto run_attack = [&](const Transcript1& t) {
    if (!a_side) return attack_kex1_B(t);
    return family == AutFamily::A ? attack_kex1_A(t) : attack_kex1_central(t);
  };
  if (!o.transcript.empty()) {
    const AnyTranscript any = transcript_from_json(read_file(o.transcript));
    const auto* t = std::get_if<Transcript1>(&any);
    if (!t) throw Error(ErrorKind::BadJson, "not a kex1 transcript");
    AttackReport report = run_attack(*t);
    return print_attack(g, certify(report, truth_from(o, t->params)), out);
  }
  const GroupParams P = parse_params(g.params);
  Rng rng(g.seed);
  const Kex1Run run = kex1_run(P, family, rng);
  AttackReport report = run_attack(run.transcript);
  return print_attack(g, certify(report, oracle::dh_oracle(run.alice, run.bob, run.transcript.g)), out);
}

int attack_kex2(const Globals& g, const AttackOptions& o, std::ostream& out) {
  if (!o.transcript.empty()) {
    const AnyTranscript any = transcript_from_json(read_file(o.transcript));
    const auto* t = std::get_if<Transcript2>(&any);
    if (!t) throw Error(ErrorKind::BadJson, "not a kex2 transcript");
    AttackReport report = attack_kex2_B(*t);
    return print_attack(g, certify(report, truth_from(o, t->params)), out);
  }
  const GroupParams P = parse_params(g.params);
  Rng rng(g.seed);
  const Kex2Run run = kex2_run(P, AutFamily::B, rng);
  AttackReport report = attack_kex2_B(run.transcript);
  return print_attack(g, certify(report, apply(run.hidden, run.g)), out);
}

int attack_sig(const Globals& g, const AttackOptions& o, std::ostream& out) {
  Rng rng(g.seed);
  if (!o.transcript.empty()) {
    const AnyTranscript any = transcript_from_json(read_file(o.transcript));
    const auto* t = std::get_if<SigTranscript>(&any);
    if (!t) throw Error(ErrorKind::BadJson, "not a signature transcript");
    return print_attack(g, attack_signature(t->alpha, t->beta, sample_element(t->params, rng), rng), out);
  }
  const GroupParams P = parse_params(g.params);
  const SigningKey key = keygen(P, rng);
  return print_attack(g, attack_signature(key.alpha, key.beta, sample_element(P, rng), rng), out);
}

int oracle_verify(const Globals& g, std::size_t samples, std::ostream& out) {
  const GroupParams P = parse_params(g.params);
  Rng rng(g.seed);
  std::vector<std::pair<std::string, bool>> checks;

  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Element x = sample_element(P, rng);
    const Element y = sample_element(P, rng);
    if (!(multiply(x, y) == oracle::naive_multiply(x, y))) ++mismatches;
  }
  checks.emplace_back("multiply agrees with rewriting on " + std::to_string(samples) + " pairs", mismatches == 0);

  const bool enumerable = P.order() && *P.order() <= kInfoEnumerationBound;
  if (enumerable) {
    const std::uint64_t p = P.p();
    const auto center = oracle::enumerate_center(P);
    checks.emplace_back("|Z| = p^(m+n-2)", log_p(center.size(), p) == P.m() + P.n() - 2);
    checks.emplace_back("|G'| = p^(n-1)", log_p(oracle::enumerate_derived(P).size(), p) == P.n() - 1);
    checks.emplace_back("|Phi| p^n = |G|",
                        log_p(oracle::frattini_by_maximal_subgroups(P).size(), p) + P.n() == P.order_log());
    std::size_t central = 0;
    bool agree = true;
    const std::set<Element> zset(center.begin(), center.end());
    for (const Element& x : oracle::enumerate_group(P)) {
      const bool c = is_central(x);
      central += c;
      agree = agree && c == (zset.count(x) == 1);
    }
    checks.emplace_back("is_central matches the enumerated center", agree && central == center.size());
  }

  bool all = true;
  if (g.json) {
    ordered_json j = ordered_json::array();
    for (const auto& [name, ok] : checks) j.push_back({{"check", name}, {"pass", ok}});
    out << j.dump(2) << '\n';
  }
  for (const auto& [name, ok] : checks) {
    all = all && ok;
    if (!g.json) out << (ok ? "PASS " : "FAIL ") << name << '\n';
  }
  return all ? 0 : 1;
}

struct PeerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 7040;
  std::string family = "A";
  std::string out_path;
  int timeout_ms = 10000;
};

int peer_cmd(const Globals& g, const PeerOptions& o, bool serve, std::ostream& out) {
  const GroupParams P = parse_params(g.params);
  const AutFamily family = parse_family(o.family);
  const std::chrono::milliseconds timeout(o.timeout_ms);
  wire::Session session = [&] {
    if (serve) {
      wire::TcpListener listener(o.host, o.port);
      wire::FdStream stream = listener.accept(timeout);
      return wire::run_kex1_server(stream, P, g.seed, family);
    }
    wire::FdStream stream = wire::connect_tcp(o.host, o.port, timeout);
    return wire::run_kex1_client(stream, P, g.seed, family);
  }();
  if (!o.out_path.empty()) write_file(o.out_path, to_json(session.transcript));
  Report r(g.json);
  r.add("role", std::string(serve ? "server" : "client"))
      .add("g", session.transcript.g)
      .add("msg_a", session.transcript.msg_a)
      .add("msg_b", session.transcript.msg_b)
      .add("key", session.key)
      .add("digest", session.digest);
  r.print(out);
  return 0;
}

struct ScalarOptions {
  std::optional<std::uint64_t> k2;
  std::optional<std::uint64_t> S;
  std::optional<std::uint64_t> beta2;
};

int scalar_demo(const Globals& g, const ScalarOptions& o, std::ostream& out) {
  const GroupParams P = parse_params(g.params);
  if (o.k2 || o.S || o.beta2) {
    if (!o.k2 || !o.S || !o.beta2) throw Error(ErrorKind::RangeViolation, "--k2, --S and --beta2 go together");
    const ScalarSecret sec = ScalarSecret::make(P, *o.k2, *o.S);
    Report r(g.json);
    r.add("k2", sec.k2).add("S", sec.S).add("beta2", *o.beta2).add("message", scalar_message(P, sec, *o.beta2));
    r.print(out);
    return 0;
  }
  Rng rng(g.seed);
  const Kex1Run run = kex1_run(P, AutFamily::A, rng);
  const Element& base = run.transcript.g;
  const std::uint64_t beta2 = base[2];
  const ScalarSecret sa = ScalarSecret::of(run.alice.a_part, base);
  const ScalarSecret sb = ScalarSecret::of(run.bob.a_part, base);
  const std::uint64_t ma = scalar_message(P, sa, beta2);
  const std::uint64_t mb = scalar_message(P, sb, beta2);
  const std::uint64_t ka = scalar_key(P, sa, mb, beta2);
  const std::uint64_t kb = scalar_key(P, sb, ma, beta2);
  const bool agree = ka == kb && ka == run.alice_key[2];
  Report r(g.json);
  r.add("beta2", beta2)
      .add("msg_a", ma)
      .add("msg_b", mb)
      .add("alice_key", ka)
      .add("bob_key", kb)
      .add("group_key_a2", run.alice_key[2])
      .add("agree", agree);
  r.print(out);
  return agree ? 0 : 1;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Key exchange and cryptanalysis over the p-groups G_n(m,p)", "pgkex"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--params", g.params, "group parameters p,m,n")->capture_default_str();
  app.add_option("--seed", g.seed, "seed for every random choice")->capture_default_str();
  app.add_flag("--json", g.json, "machine-readable output");

  auto* group = app.add_subcommand("group", "structure of G")->require_subcommand(1);
  auto* group_info_cmd = group->add_subcommand("info", "orders of G, Z(G), G', Phi(G) and Aut_c(G)");

  auto* el = app.add_subcommand("el", "element arithmetic")->require_subcommand(1);
  std::string lhs;
  std::string rhs;
  std::int64_t exponent = 0;
  auto* el_mul = el->add_subcommand("mul", "x*y");
  el_mul->add_option("x", lhs)->required();
  el_mul->add_option("y", rhs)->required();
  auto* el_inv = el->add_subcommand("inv", "x^-1");
  el_inv->add_option("x", lhs)->required();
  auto* el_pow = el->add_subcommand("pow", "x^e");
  el_pow->add_option("x", lhs)->required();
  el_pow->add_option("e", exponent)->required();
  auto* el_comm = el->add_subcommand("comm", "[x,y] = x^-1 y^-1 x y");
  el_comm->add_option("x", lhs)->required();
  el_comm->add_option("y", rhs)->required();

  std::string family = "AB";
  std::string out_path;
  auto* kex1 = app.add_subcommand("kex1", "Key Exchange Protocol I")->require_subcommand(1);
  auto* kex1_demo_cmd = kex1->add_subcommand("demo", "one seeded session");
  kex1_demo_cmd->add_option("--family", family, "A, B or AB")->capture_default_str();
  kex1_demo_cmd->add_option("--out", out_path, "write the transcript as JSON");
  auto* kex2 = app.add_subcommand("kex2", "Key Exchange Protocol II")->require_subcommand(1);
  auto* kex2_demo_cmd = kex2->add_subcommand("demo", "one seeded session");
  kex2_demo_cmd->add_option("--family", family, "A, B or AB")->capture_default_str();
  kex2_demo_cmd->add_option("--out", out_path, "write the transcript as JSON");

  std::string message;
  auto* sign_sub = app.add_subcommand("sign", "generate a key pair and sign a message");
  sign_sub->add_option("--message", message, "message element (random if omitted)");
  sign_sub->add_option("--out", out_path, "write the signature transcript as JSON");
  std::string transcript_path;
  auto* verify_sub = app.add_subcommand("verify", "check a signature transcript");
  verify_sub->add_option("--transcript", transcript_path)->required();

  AttackOptions ao;
  auto* attack = app.add_subcommand("attack", "recover keys from public data")->require_subcommand(1);
  auto add_attack = [&](const char* name, const char* help) {
    auto* sub = attack->add_subcommand(name, help);
    sub->add_option("--transcript", ao.transcript, "attack a transcript file instead of a fresh run");
    sub->add_option("--key", ao.key, "true key used to certify a transcript file");
    return sub;
  };
  auto* attack_kex1a = add_attack("kex1a", "KEX-I with A-family maps (knapsack)");
  attack_kex1a->add_option("--family", ao.family, "A, or AB for mixed central maps")->capture_default_str();
  auto* attack_kex1b = add_attack("kex1b", "KEX-I with B-family maps");
  auto* attack_kex2b = add_attack("kex2b", "KEX-II with B-family maps");
  auto* attack_sig_cmd = add_attack("sig", "forge signatures by conjugacy search");

  std::size_t samples = 1000;
  auto* oracle_cmd = app.add_subcommand("oracle", "independent cross-checks")->require_subcommand(1);
  auto* oracle_verify_cmd = oracle_cmd->add_subcommand("verify", "fast arithmetic vs naive rewriting");
  oracle_verify_cmd->add_option("--samples", samples)->capture_default_str();

  PeerOptions po;
  auto* peer = app.add_subcommand("peer", "KEX-I over TCP")->require_subcommand(1);
  auto add_peer = [&](const char* name, const char* help) {
    auto* sub = peer->add_subcommand(name, help);
    sub->add_option("--host", po.host)->capture_default_str();
    sub->add_option("--port", po.port)->capture_default_str();
    sub->add_option("--family", po.family)->capture_default_str();
    sub->add_option("--out", po.out_path, "write the wire transcript as JSON");
    sub->add_option("--timeout-ms", po.timeout_ms)->capture_default_str();
    return sub;
  };
  auto* peer_serve = add_peer("serve", "accept one session as Alice");
  add_peer("connect", "run one session as Bob");

  ScalarOptions so;
  auto* scalar = app.add_subcommand("scalar", "a2-exponent fast path")->require_subcommand(1);
  auto* scalar_demo_cmd = scalar->add_subcommand("demo", "scalar exchange checked against group mode");
  scalar_demo_cmd->add_option("--k2", so.k2);
  scalar_demo_cmd->add_option("--S", so.S);
  scalar_demo_cmd->add_option("--beta2", so.beta2);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*group_info_cmd) return group_info(g, out);
    if (*el) {
      const GroupParams P = parse_params(g.params);
      const Element x = parse_element(lhs, P);
      Element result = x;
      if (*el_mul) result = x * parse_element(rhs, P);
      if (*el_inv) result = inverse(x);
      if (*el_pow) result = power(x, exponent);
      if (*el_comm) result = commutator(x, parse_element(rhs, P));
      Report(g.json).add("result", result).print(out);
      return 0;
    }
    if (*kex1_demo_cmd) return kex1_demo(g, family, out_path, out);
    if (*kex2_demo_cmd) return kex2_demo(g, family, out_path, out);
    if (*sign_sub) return sign_cmd(g, message, out_path, out);
    if (*verify_sub) return verify_cmd(g, transcript_path, out);
    if (*attack_kex1a) return attack_kex1(g, ao, true, out);
    if (*attack_kex1b) return attack_kex1(g, ao, false, out);
    if (*attack_kex2b) return attack_kex2(g, ao, out);
    if (*attack_sig_cmd) return attack_sig(g, ao, out);
    if (*oracle_verify_cmd) return oracle_verify(g, samples, out);
    if (*peer) return peer_cmd(g, po, peer_serve->parsed(), out);
    if (*scalar_demo_cmd) return scalar_demo(g, so, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace pgkex::cli
