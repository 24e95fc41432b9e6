#include "fbl/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "fbl/errors.hpp"
#include "fbl/expr_parser.hpp"
#include "fbl/fbl_norm.hpp"
#include "fbl/nakano.hpp"
#include "fbl/oracle.hpp"
#include "fbl/sampling.hpp"
#include "fbl/witnesses.hpp"

namespace fbl::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kExactFlag = "exact";
constexpr const char* kOracleFlag = "oracle";
constexpr const char* kLowerFlag = "heuristic-lower-bound";

double parse_number(std::string_view s, const std::string& what) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw ValidationError(what + ": '" + std::string(s) + "' is not a number");
  return v;
}

int parse_dim(std::string_view s, const std::string& what) {
  const double v = parse_number(s, what);
  if (v != std::floor(v) || v < 1 || v > 1e6) throw ValidationError(what + ": dimension must be a positive integer");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what));
  if (out.empty()) throw ValidationError(what + ": empty list");
  return out;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json columns_json(const Eigen::MatrixXd& M) {
  json a = json::array();
  for (Eigen::Index j = 0; j < M.cols(); ++j) a.push_back(to_json(M.col(j)));
  return a;
}

// ---------------------------------------------------------------------------
// Checked field access with path diagnostics.

const json* field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& where, std::optional<double> fallback = {}) {
  const json* v = field(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ValidationError(where + "." + key + ": missing");
  }
  if (!v->is_number()) throw ValidationError(where + "." + key + ": expected a number");
  return v->get<double>();
}

int get_int(const json& obj, const char* key, const std::string& where, std::optional<int> fallback = {}) {
  const json* v = field(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ValidationError(where + "." + key + ": missing");
  }
  if (!v->is_number_integer()) throw ValidationError(where + "." + key + ": expected an integer");
  return v->get<int>();
}

std::string get_string(const json& obj, const char* key, const std::string& where, std::optional<std::string> fallback = {}) {
  const json* v = field(obj, key);
  if (!v) {
    if (fallback) return *fallback;
    throw ValidationError(where + "." + key + ": missing");
  }
  if (!v->is_string()) throw ValidationError(where + "." + key + ": expected a string");
  return v->get<std::string>();
}

std::vector<double> get_numbers(const json& obj, const char* key, const std::string& where) {
  const json* v = field(obj, key);
  if (!v || !v->is_array() || v->empty()) throw ValidationError(where + "." + key + ": expected a nonempty array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) throw ValidationError(where + "." + key + "[" + std::to_string(i) + "]: expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

Space space_from_json(const json& j, const std::string& where) {
  if (j.is_string()) return parse_space(j.get<std::string>());
  if (!j.is_object()) throw ValidationError(where + ": expected a descriptor string or object");
  const std::string kind = get_string(j, "kind", where);
  if (kind == "l1") return Space::l1(get_int(j, "dim", where));
  if (kind == "l2") return Space::l2(get_int(j, "dim", where));
  if (kind == "linf") return Space::linf(get_int(j, "dim", where));
  if (kind == "lp") {
    const json* p = field(j, "p");
    const double e = p && p->is_string() && p->get<std::string>() == "inf" ? kInfinity : get_number(j, "p", where);
    return Space::lp(get_int(j, "dim", where), e);
  }
  if (kind == "wl1") return Space::weighted_l1(to_vec(get_numbers(j, "weights", where)));
  if (kind == "polytope") {
    const json* v = field(j, "vertices");
    if (!v || !v->is_array() || v->empty()) throw ValidationError(where + ".vertices: expected a nonempty array of points");
    const int n = get_int(j, "dim", where);
    Eigen::MatrixXd V(n, static_cast<Eigen::Index>(v->size()));
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::string at = where + ".vertices[" + std::to_string(i) + "]";
      if (!(*v)[i].is_array() || (*v)[i].size() != static_cast<std::size_t>(n)) {
        throw ValidationError(at + ": expected " + std::to_string(n) + " coordinates");
      }
      for (int r = 0; r < n; ++r) {
        if (!(*v)[i][static_cast<std::size_t>(r)].is_number()) throw ValidationError(at + ": expected numbers");
        V(r, static_cast<Eigen::Index>(i)) = (*v)[i][static_cast<std::size_t>(r)].get<double>();
      }
    }
    return Space::polytope(V);
  }
  if (kind == "direct_sum") {
    const json* parts = field(j, "parts");
    if (!parts || !parts->is_array() || parts->empty()) throw ValidationError(where + ".parts: expected a nonempty array");
    std::vector<Space> spaces;
    for (std::size_t i = 0; i < parts->size(); ++i) {
      spaces.push_back(space_from_json((*parts)[i], where + ".parts[" + std::to_string(i) + "]"));
    }
    const json* p = field(j, "p");
    const double e = p && p->is_string() && p->get<std::string>() == "inf" ? kInfinity : get_number(j, "p", where);
    return Space::direct_sum(spaces, e);
  }
  throw ValidationError(where + ".kind: unknown space kind '" + kind + "'");
}

// ---------------------------------------------------------------------------

struct Context {
  std::optional<Space> space;
  std::map<std::string, LatticeExpr> exprs;
  std::map<std::string, DirectedFamily> families;
  Budget budget;
};

const Space& need_space(const Context& ctx, const std::string& where) {
  if (!ctx.space) throw ValidationError(where + ": no space given (--space or the file's \"space\")");
  return *ctx.space;
}

const LatticeExpr& need_expr(const Context& ctx, const json& task, const std::string& where) {
  const std::string name = get_string(task, "expr", where);
  const auto it = ctx.exprs.find(name);
  if (it == ctx.exprs.end()) throw ValidationError(where + ".expr: unknown expression '" + name + "'");
  return it->second;
}

const DirectedFamily& need_family(const Context& ctx, const json& task, const std::string& where) {
  const std::string name = get_string(task, "family", where);
  const auto it = ctx.families.find(name);
  if (it == ctx.families.end()) throw ValidationError(where + ".family: unknown family '" + name + "'");
  return it->second;
}

int positive(int v, const std::string& what) {
  if (v < 1) throw ValidationError(what + ": must be positive");
  return v;
}

json certificate_json(const Certificate& c) {
  json j;
  j["tuple"] = columns_json(c.tuple);
  j["constraint"] = c.constraint;
  j["objective"] = c.objective;
  j["value"] = c.value;
  j["constraint_route"] = to_string(c.exactness);
  return j;
}

json norm_task(const Context& ctx, const json& task, const std::string& where) {
  const Space& space = need_space(ctx, where);
  const LatticeExpr& f = need_expr(ctx, task, where);
  const double p = get_number(task, "p", where, 1.0);
  json r;
  r["task"] = "norm";
  r["space"] = space.describe();
  r["expr"] = f.to_string();
  r["p"] = p;
  json flags;
  flags["p"] = kExactFlag;
  if (field(task, "k")) {
    const int k = positive(get_int(task, "k", where), where + ".k");
    const NormEstimate est = fbl_norm_k(space, f, p, k, ctx.budget);
    r["k"] = k;
    r["value"] = est.value;
    r["certificate"] = certificate_json(est.best);
    flags["k"] = kExactFlag;
  } else {
    const double eps = get_number(task, "eps", where, 1e-3);
    const int ceiling = positive(get_int(task, "k_max", where, 16), where + ".k_max");
    const FullNormEstimate est = fbl_norm(space, f, p, eps, ctx.budget, ceiling);
    r["eps"] = eps;
    r["k_used"] = est.k_used;
    r["plateau"] = est.plateau;
    r["value"] = est.value;
    json trace = json::array();
    for (const auto& t : est.trace) trace.push_back({{"k", t.k}, {"value", t.value}});
    r["table"] = trace;
    r["certificate"] = certificate_json(est.trace.back().best);
    flags["eps"] = kExactFlag;
    flags["k_used"] = kExactFlag;
    flags["table"] = kLowerFlag;
  }
  flags["value"] = kLowerFlag;
  flags["certificate"] = kLowerFlag;
  if (field(task, "oracle_eta")) {
    const double eta = get_number(task, "oracle_eta", where);
    const int k = field(task, "k") ? get_int(task, "k", where) : 1;
    r["oracle_eta"] = eta;
    r["oracle"] = oracle_norm_net(space, f, p, k, eta);
    flags["oracle_eta"] = kExactFlag;
    flags["oracle"] = kOracleFlag;
  }
  r["flags"] = flags;
  return r;
}

json nakano_json(const NakanoReport& rep) {
  json r;
  r["method"] = to_string(rep.method);
  r["member_norms"] = rep.member_norms;
  r["sup_member_norm"] = rep.sup_member_norm;
  r["bound_norm"] = rep.bound_norm;
  r["ratio"] = rep.ratio;
  r["delta_used"] = rep.delta_used;
  if (rep.phi) r["phi"] = rep.phi->coeffs();
  r["dominates"] = rep.dominates;
  r["min_gap"] = rep.min_gap;
  json flags;
  flags["member_norms"] = kLowerFlag;
  flags["sup_member_norm"] = kLowerFlag;
  flags["bound_norm"] = rep.bound_norm_exact ? kExactFlag : kLowerFlag;
  flags["ratio"] = kLowerFlag;
  flags["delta_used"] = kExactFlag;
  if (rep.phi) flags["phi"] = kExactFlag;
  flags["min_gap"] = kExactFlag;
  r["flags"] = flags;
  return r;
}

json bound_task(const Context& ctx, const json& task, const std::string& where) {
  const Space& space = need_space(ctx, where);
  const int k = positive(get_int(task, "k", where, 2), where + ".k");
  const double eps = get_number(task, "eps", where, 0.1);
  json r;
  r["task"] = "bound";
  r["space"] = space.describe();
  r["k"] = k;
  r["eps"] = eps;
  if (field(task, "family")) {
    NakanoOptions opts;
    opts.budget = ctx.budget;
    opts.eps = eps;
    r["family"] = get_string(task, "family", where);
    r["report"] = nakano_json(strong_nakano_report(space, need_family(ctx, task, where), 1.0, k, NakanoMethod::kCover, opts));
    r["flags"] = {{"k", kExactFlag}, {"eps", kExactFlag}};
    return r;
  }
  const LatticeExpr& f = need_expr(ctx, task, where);
  CoverOptions opts;
  opts.budget = ctx.budget;
  const CoverResult c = cover_upper_bound(space, f, k, eps, opts);
  const double g_norm = c.report.f_norm_k > 0.0 ? fbl_norm_k(space, c.g, 1.0, k, ctx.budget).value : 0.0;
  r["expr"] = f.to_string();
  r["delta_used"] = c.delta_used;
  r["net_size"] = c.report.net_size;
  r["f_norm_k"] = c.report.f_norm_k;
  r["g_norm_k"] = g_norm;
  r["ratio"] = c.report.f_norm_k > 0.0 ? g_norm / c.report.f_norm_k : 1.0;
  r["lipschitz"] = c.report.lipschitz;
  r["max_margin"] = c.report.max_margin;
  r["min_gap"] = c.report.min_gap;
  r["validated"] = c.report.validated;
  r["dominates"] = c.report.dominates;
  r["flags"] = {{"k", kExactFlag},           {"eps", kExactFlag},       {"delta_used", kExactFlag},
                {"net_size", kExactFlag},    {"f_norm_k", kLowerFlag},  {"g_norm_k", kLowerFlag},
                {"ratio", kLowerFlag},       {"lipschitz", kLowerFlag}, {"max_margin", kLowerFlag},
                {"min_gap", kExactFlag},     {"validated", kExactFlag}};
  return r;
}

json maximal_task(const Context& ctx, const json& task, const std::string& where) {
  const Space& space = need_space(ctx, where);
  const double p = get_number(task, "p", where, 1.0);
  json r;
  r["task"] = "maximal";
  r["space"] = space.describe();
  r["p"] = p;
  if (field(task, "family")) {
    const int k = positive(get_int(task, "k", where, space.dim()), where + ".k");
    NakanoOptions opts;
    opts.budget = ctx.budget;
    r["family"] = get_string(task, "family", where);
    r["k"] = k;
    r["report"] = nakano_json(strong_nakano_report(space, need_family(ctx, task, where), p, k, NakanoMethod::kMaximal, opts));
    r["flags"] = {{"p", kExactFlag}, {"k", kExactFlag}};
    return r;
  }
  const LatticeExpr& h = need_expr(ctx, task, where);
  const MaximalResult m = maximal_majorant(space, h, p);
  r["expr"] = h.to_string();
  r["phi"] = m.phi.coeffs();
  r["phi_sum"] = m.report.phi_sum;
  r["bound_norm"] = m.bound_norm;
  r["constraints"] = m.report.constraints;
  r["rounds"] = m.report.rounds;
  r["max_violation"] = m.report.max_violation;
  r["min_gap"] = m.report.min_gap;
  r["validated"] = m.report.validated;
  r["dominates"] = m.report.dominates;
  r["flags"] = {{"p", kExactFlag},           {"phi", kExactFlag},         {"phi_sum", kExactFlag},
                {"bound_norm", kExactFlag},  {"constraints", kExactFlag}, {"rounds", kExactFlag},
                {"max_violation", kLowerFlag}, {"min_gap", kExactFlag},   {"validated", kExactFlag}};
  return r;
}

json probe_task(const Context& ctx, const json& task, const std::string& where) {
  const Space& space = need_space(ctx, where);
  const LatticeExpr& f = need_expr(ctx, task, where);
  const double p = get_number(task, "p", where, 1.0);
  std::vector<int> ks{1, 2, 4, 8};
  if (field(task, "ks")) {
    ks.clear();
    for (const double v : get_numbers(task, "ks", where)) {
      if (v != std::floor(v) || v < 1) throw ValidationError(where + ".ks: expected positive integers");
      ks.push_back(static_cast<int>(v));
    }
  }
  const auto rows = lambda_probe(space, f, ks, p, ctx.budget);
  json table = json::array();
  for (const auto& row : rows) table.push_back({{"k", row.k}, {"norm_k", row.norm_k}, {"ratio", row.ratio}});
  json r;
  r["task"] = "probe-lambda";
  r["space"] = space.describe();
  r["expr"] = f.to_string();
  r["p"] = p;
  r["table"] = table;
  r["flags"] = {{"p", kExactFlag}, {"table", kLowerFlag}};
  return r;
}

json gphi_task(const Context& ctx, const json& task, const std::string& where) {
  const double p = get_number(task, "p", where, 1.0);
  const PhiVector phi = PhiVector::finite(get_numbers(task, "phi", where), p);
  json r;
  r["task"] = "gphi";
  r["phi"] = phi.coeffs();
  r["p"] = p;
  r["norm"] = g_phi_norm(phi);
  json flags = {{"phi", kExactFlag}, {"p", kExactFlag}, {"norm", kExactFlag}};
  if (field(task, "x")) {
    const Vec x = to_vec(get_numbers(task, "x", where));
    if (static_cast<std::size_t>(x.size()) != phi.size()) throw ValidationError(where + ".x: length must match phi");
    r["x"] = to_json(x);
    r["value"] = g_phi(phi)(x);
    flags["x"] = kExactFlag;
    flags["value"] = kExactFlag;
  }
  if (field(task, "check") && task["check"].is_boolean() && task["check"].get<bool>()) {
    const int n = static_cast<int>(phi.size());
    r["fbl_norm"] = fbl_norm_k(Space::l1(n), g_phi(phi), p, n, ctx.budget).value;
    flags["fbl_norm"] = kLowerFlag;
  }
  r["flags"] = flags;
  return r;
}

json witness_task(const Context& ctx, const json& task, const std::string& where) {
  const std::string kind = get_string(task, "kind", where);
  json r;
  r["task"] = "witness";
  r["kind"] = kind;
  if (kind == "c0") {
    const C0Report c = c0_summing_demo(get_int(task, "n", where, 5));
    r["n"] = c.N;
    r["member_norms"] = c.member_norms;
    r["sup_member_norm"] = c.sup_member_norm;
    r["least_upper_bound"] = c.least_upper_bound;
    r["bound_norm"] = c.bound_norm;
    r["tail_profile"] = c.tail_profile;
    r["dominates"] = c.dominates;
    r["minimal"] = c.minimal;
    r["note"] = c.note;
    r["flags"] = {{"n", kExactFlag},           {"member_norms", kExactFlag}, {"sup_member_norm", kExactFlag},
                  {"least_upper_bound", kExactFlag}, {"bound_norm", kExactFlag},   {"tail_profile", kExactFlag}};
    return r;
  }
  if (kind == "l1") {
    const int m = get_int(task, "m", where, 4);
    const int k = positive(get_int(task, "k", where, 4), where + ".k");
    const DyadicFamily d = l1_dyadic_family(m);
    json norms = json::array();
    for (int n = 1; n <= m; ++n) {
      norms.push_back({{"n", n}, {"norm_k", fbl_norm_k(d.model.space(), d.model.f(n), 1.0, k, ctx.budget).value}});
    }
    // Limit identity on seeded integer-valued block functionals, one per level.
    Rng rng(ctx.budget.seed);
    std::uniform_int_distribution<int> value(-3, 3);
    json checks = json::array();
    for (int n = 0; n <= m; ++n) {
      std::vector<double> vals(std::size_t{1} << n);
      for (double& v : vals) v = value(rng);
      const LimitCheck c = l1_limit_check(d.model, d.model.block_functional(n, vals), n);
      checks.push_back({{"n", n}, {"block_values", vals}, {"f_values", c.values}, {"l1_norm", c.l1_norm},
                        {"equal", c.equal}, {"nondecreasing", c.nondecreasing}});
    }
    r["m"] = m;
    r["k"] = k;
    r["increasing"] = true;  // verified when the family was built
    r["table"] = norms;
    r["limit_checks"] = checks;
    r["flags"] = {{"m", kExactFlag}, {"k", kExactFlag}, {"table", kLowerFlag}, {"limit_checks", kExactFlag}};
    return r;
  }
  throw ValidationError(where + ".kind: expected c0 or l1");
}

json selftest_task(const Context& ctx) {
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, double value, double expected, double tol) {
    const bool pass = std::abs(value - expected) <= tol;
    all = all && pass;
    checks.push_back({{"name", name}, {"value", value}, {"expected", expected}, {"pass", pass}});
  };
  Budget b = ctx.budget;
  b.starts = std::min(b.starts, 16);
  const Space l13 = Space::l1(3);
  Vec x(3);
  x << 0.5, -1.25, 2.0;
  record("delta isometry on l1:3", fbl_norm_k(l13, delta(l13, x), 1.0, 1, b).value, 3.75, 1e-6);
  const Space l12 = Space::l1(2);
  const auto e1 = abs(delta(l12, Vec::Unit(2, 0)));
  const auto e2 = abs(delta(l12, Vec::Unit(2, 1)));
  record("join norm on l1:2, k=2", fbl_norm_k(l12, join(e1, e2), 1.0, 2, b).value, 2.0, 1e-6);
  record("meet norm on l1:2, k=1", fbl_norm_k(l12, meet(e1, e2), 1.0, 1, b).value, 1.0, 1e-6);
  record("g_phi norm (1/2,1/2)", g_phi_norm(PhiVector::finite({0.5, 0.5})), 1.0, 0.0);
  const C0Report c0 = c0_summing_demo(5);
  record("c0 tail profile minimum", *std::min_element(c0.tail_profile.begin(), c0.tail_profile.end()), 1.0, 0.0);
  const DyadicModel model(2);
  const LimitCheck lc = l1_limit_check(model, model.block_functional(1, {1.0, -1.0}), 1);
  record("dyadic limit identity", lc.values[1] - lc.l1_norm, 0.0, 0.0);
  json r;
  r["task"] = "selftest";
  r["checks"] = checks;
  r["pass"] = all;
  r["flags"] = {{"checks", kExactFlag}};
  return r;
}

json run_task(const Context& ctx, const json& task, const std::string& where) {
  if (!task.is_object()) throw ValidationError(where + ": expected an object");
  const std::string type = get_string(task, "type", where);
  if (type == "norm") return norm_task(ctx, task, where);
  if (type == "bound") return bound_task(ctx, task, where);
  if (type == "maximal") return maximal_task(ctx, task, where);
  if (type == "probe" || type == "probe-lambda") return probe_task(ctx, task, where);
  if (type == "gphi") return gphi_task(ctx, task, where);
  if (type == "witness") return witness_task(ctx, task, where);
  if (type == "selftest") return selftest_task(ctx);
  throw ValidationError(where + ".type: unknown task type '" + type + "'");
}

std::string task_type_of(const std::string& subcommand) {
  return subcommand == "probe-lambda" ? "probe" : subcommand;
}

// ---------------------------------------------------------------------------
// Problem files

void load_budget(const json& j, Budget& b, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  if (field(j, "seed")) {
    if (!j["seed"].is_number_unsigned()) throw ValidationError(where + ".seed: expected a nonnegative integer");
    b.seed = j["seed"].get<std::uint64_t>();
  }
  b.starts = positive(get_int(j, "starts", where, b.starts), where + ".starts");
  b.iters = positive(get_int(j, "iters", where, b.iters), where + ".iters");
  b.k_exact = positive(get_int(j, "k_exact", where, b.k_exact), where + ".k_exact");
}

json load_file(const std::string& path, Context& ctx) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open problem file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    const auto nl = text.rfind('\n', upto == 0 ? 0 : upto - 1);
    const std::size_t column = nl == std::string::npos ? upto + 1 : upto - nl;
    throw ValidationError(path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": malformed JSON");
  }
  if (!doc.is_object()) throw ValidationError(path + ": top level must be an object");

  if (field(doc, "space")) ctx.space = space_from_json(doc["space"], "space");
  if (field(doc, "optimizer")) load_budget(doc["optimizer"], ctx.budget, "optimizer");
  if (field(doc, "seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ValidationError("seed: expected a nonnegative integer");
    ctx.budget.seed = doc["seed"].get<std::uint64_t>();
  }
  if (const json* e = field(doc, "expressions")) {
    if (!e->is_object()) throw ValidationError("expressions: expected an object of name -> expression");
    if (!ctx.space) throw ValidationError("expressions: a space is required");
    for (const auto& [name, text_value] : e->items()) {
      if (!text_value.is_string()) throw ValidationError("expressions." + name + ": expected a string");
      try {
        ctx.exprs.insert_or_assign(name, parse_expression(text_value.get<std::string>(), ctx.space->dim(), ctx.exprs));
      } catch (const ValidationError& err) {
        throw ValidationError("expressions." + name + ": " + err.what());
      }
    }
  }
  if (const json* fams = field(doc, "families")) {
    if (!fams->is_object()) throw ValidationError("families: expected an object of name -> family");
    for (const auto& [name, entry] : fams->items()) {
      const std::string where = "families." + name;
      const bool direct = field(entry, "directify") != nullptr;
      const json* list = field(entry, direct ? "directify" : "members");
      if (!list || !list->is_array() || list->empty()) throw ValidationError(where + ": expected \"members\" or \"directify\" with a nonempty list");
      std::vector<HomFn> items;
      for (const auto& item : *list) {
        const std::string ref = item.is_string() ? item.get<std::string>() : "";
        const auto it = ctx.exprs.find(ref);
        if (it == ctx.exprs.end()) throw ValidationError(where + ": unknown expression '" + ref + "'");
        items.push_back(it->second.fn());
      }
      const Space& space = need_space(ctx, where);
      ctx.families.insert_or_assign(name, direct ? directify(space, items) : DirectedFamily::verified(space, items));
    }
  }
  const json* tasks = field(doc, "tasks");
  if (!tasks || !tasks->is_array()) throw ValidationError(path + ": \"tasks\" must be an array");
  return *tasks;
}

// ---------------------------------------------------------------------------
// Output

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

void write_csv(const json& report, std::ostream& os) {
  const json* table = field(report, "table");
  if (table && table->is_array() && !table->empty() && (*table)[0].is_object()) {
    std::vector<std::string> cols;
    for (const auto& [k, v] : (*table)[0].items()) cols.push_back(k);
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
    os << "\n";
    for (const auto& row : *table) {
      for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << row[cols[c]].dump();
      os << "\n";
    }
    return;
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  os << "field,value\n";
  for (const auto& [k, v] : rows) {
    const bool quote = v.find(',') != std::string::npos;
    os << k << "," << (quote ? "\"" + v + "\"" : v) << "\n";
  }
}

int threads_from_env() {
  const char* env = std::getenv("FBL_THREADS");
  if (!env || !*env) return 0;
  const double v = parse_number(env, "FBL_THREADS");
  if (v != std::floor(v) || v < 0 || v > 4096) throw ValidationError("FBL_THREADS: expected a nonnegative integer");
  return static_cast<int>(v);
}

}  // namespace

Space parse_space(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("space '" + text + "': expected kind:args (l1:2, lp:3:1.5, wl1:0.5,0.5)");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  const std::string what = "space '" + text + "'";
  if (kind == "l1") return Space::l1(parse_dim(rest, what));
  if (kind == "l2") return Space::l2(parse_dim(rest, what));
  if (kind == "linf") return Space::linf(parse_dim(rest, what));
  if (kind == "lp") {
    const auto c2 = rest.find(':');
    if (c2 == std::string::npos) throw ValidationError(what + ": expected lp:n:p");
    const std::string ps = rest.substr(c2 + 1);
    return Space::lp(parse_dim(rest.substr(0, c2), what), ps == "inf" ? kInfinity : parse_number(ps, what));
  }
  if (kind == "wl1") return Space::weighted_l1(to_vec(parse_list(rest, what)));
  throw ValidationError(what + ": unknown kind '" + kind + "'");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Free Banach lattice norms, Nakano upper bounds and witnesses"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::string space_text, expr_text, out_path, file_path, phi_text, x_text, ks_text, method;
  int k = 0, n = 5, m = 4, starts = 0, iters = 0, k_max = 16;
  double p = 1.0, eps = 0.0, oracle_eta = 0.0;
  std::uint64_t seed = 0;
  bool csv = false, check = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--space", space_text, "l1:n, l2:n, linf:n, lp:n:p or wl1:w1,w2,...");
    sub->add_option("--expr", expr_text, "lattice expression");
    sub->add_option("--k", k, "number of functionals");
    sub->add_option("--p", p, "convexity exponent");
    sub->add_option("--eps", eps, "relative tolerance");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--starts", starts, "optimizer multi-starts");
    sub->add_option("--iters", iters, "pattern-search sweeps per start");
    sub->add_option("--out", out_path, "write the report to this file");
    sub->add_flag("--csv", csv, "emit CSV instead of JSON");
    sub->add_option("--file", file_path, "JSON problem file");
  };
  CLI::App* norm = app.add_subcommand("norm", "FBL_k norm lower bound (or escalate k without --k)");
  common(norm);
  norm->add_option("--k-max", k_max, "largest k of the doubling schedule");
  norm->add_option("--oracle", oracle_eta, "also run the net oracle with this eta");
  CLI::App* bound = app.add_subcommand("bound", "sphere-cover upper bound");
  common(bound);
  CLI::App* maximal = app.add_subcommand("maximal", "maximal majorant g_phi on l1 spaces");
  common(maximal);
  CLI::App* probe = app.add_subcommand("probe-lambda", "table of FBL_k norms over k");
  common(probe);
  probe->add_option("--ks", ks_text, "comma-separated increasing k values");
  CLI::App* gphi = app.add_subcommand("gphi", "g_phi norm and values");
  common(gphi);
  gphi->add_option("--phi", phi_text, "comma-separated coefficients");
  gphi->add_option("--x", x_text, "evaluation point");
  gphi->add_flag("--check", check, "compare with the optimizer on l1^n");
  CLI::App* witness = app.add_subcommand("witness", "c0 and L1 witnesses");
  common(witness);
  std::string witness_kind;
  witness->add_option("kind", witness_kind, "c0 or l1")->check(CLI::IsMember({"c0", "l1"}));
  witness->add_option("--n", n, "c0: number of summing vectors");
  witness->add_option("--m", m, "l1: dyadic level");
  CLI::App* selftest = app.add_subcommand("selftest", "quick built-in checks");
  common(selftest);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidationFailure;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    Context ctx;
    ctx.budget.threads = threads_from_env();
    json tasks = json::array();
    if (!file_path.empty()) {
      const json file_tasks = load_file(file_path, ctx);
      for (std::size_t i = 0; i < file_tasks.size(); ++i) {
        const json& t = file_tasks[i];
        if (t.is_object() && t.value("type", "") == task_type_of(name)) {
          json copy = t;
          copy["_where"] = "tasks[" + std::to_string(i) + "]";
          tasks.push_back(copy);
        }
      }
      if (tasks.empty()) throw ValidationError(file_path + ": no tasks of type '" + task_type_of(name) + "'");
    }
    if (!space_text.empty()) ctx.space = parse_space(space_text);
    if (sub->count("--seed")) ctx.budget.seed = seed;
    if (starts) ctx.budget.starts = positive(starts, "--starts");
    if (iters) ctx.budget.iters = positive(iters, "--iters");

    if (file_path.empty()) {
      json t;
      t["type"] = task_type_of(name);
      if (!expr_text.empty()) {
        const Space& space = need_space(ctx, "--expr");
        ctx.exprs.insert_or_assign("expr", parse_expression(expr_text, space.dim()));
        t["expr"] = "expr";
      }
      if (sub->count("--k")) t["k"] = k;
      if (sub->count("--p")) t["p"] = p;
      if (sub->count("--eps")) t["eps"] = eps;
      if (name == "norm") {
        t["k_max"] = k_max;
        if (sub->count("--oracle")) t["oracle_eta"] = oracle_eta;
      }
      if (name == "probe-lambda" && !ks_text.empty()) t["ks"] = parse_list(ks_text, "--ks");
      if (name == "gphi") {
        if (phi_text.empty()) throw ValidationError("gphi: --phi is required");
        t["phi"] = parse_list(phi_text, "--phi");
        if (!x_text.empty()) t["x"] = parse_list(x_text, "--x");
        t["check"] = check;
      }
      if (name == "witness") {
        if (witness_kind.empty()) throw ValidationError("witness: kind (c0 or l1) is required");
        t["kind"] = witness_kind;
        t["n"] = n;
        t["m"] = m;
        if (!sub->count("--k")) t["k"] = 4;
      }
      t["_where"] = std::string("command line");
      tasks.push_back(t);
    }

    json reports = json::array();
    bool selftest_failed = false;
    for (const json& t : tasks) {
      json r = run_task(ctx, t, t["_where"].get<std::string>());
      if (r.value("task", "") == "selftest" && !r.value("pass", false)) selftest_failed = true;
      reports.push_back(std::move(r));
    }

    std::ofstream file_out;
    std::ostream* os = &out;
    if (!out_path.empty()) {
      file_out.open(out_path);
      if (!file_out) throw ValidationError("cannot write '" + out_path + "'");
      os = &file_out;
    }
    if (csv) {
      for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i) *os << "\n";
        write_csv(reports[i], *os);
      }
    } else if (file_path.empty()) {
      *os << reports[0].dump(2) << "\n";
    } else {
      json doc;
      doc["file"] = file_path;
      doc["reports"] = reports;
      *os << doc.dump(2) << "\n";
    }
    return selftest_failed ? kComputationFailure : kOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const ComputationError& e) {
    err << "computation failed: " << e.what() << "\n";
    return kComputationFailure;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const std::exception& e) {
    err << "computation failed: " << e.what() << "\n";
    return kComputationFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace fbl::cli
