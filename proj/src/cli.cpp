#include "spectral_cantor/cli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "spectral_cantor/acceptance.hpp"
#include "spectral_cantor/cantor_points.hpp"
#include "spectral_cantor/connes_distance.hpp"
#include "spectral_cantor/fractal_embed.hpp"
#include "spectral_cantor/gns_cantor.hpp"
#include "spectral_cantor/matrix_triple.hpp"
#include "spectral_cantor/summability.hpp"
#include "spectral_cantor/version.hpp"

namespace spectral_cantor {

namespace {

using nlohmann::ordered_json;

struct Validation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  if (c.gamma) j["gamma"] = *c.gamma;
  if (c.mu) j["mu"] = *c.mu;
  if (c.level) j["level"] = *c.level;
  if (c.trunc) j["trunc"] = *c.trunc;
  if (c.s) j["s"] = *c.s;
  if (c.p) j["p"] = *c.p;
  j["horizon"] = c.horizon;
  j["seed"] = c.seed;
  j["tol"] = c.tol;
  j["format"] = c.format;
  if (!c.points.empty()) j["points"] = c.points;
  if (c.random) j["random"] = c.random;
  if (c.all) j["all"] = true;
  j["connes"] = c.connes;
  j["quick"] = c.quick;
  if (!c.phi.empty()) j["phi"] = c.phi;
  if (!c.psi.empty()) j["psi"] = c.psi;
  if (c.command == "dimension") j["method"] = c.method;
  if (!c.vector.empty()) j["vector"] = c.vector;
  if (c.command == "matrix-triple") {
    j["n"] = c.n;
    j["trials"] = c.trials;
  }
  return j;
}

// Key/value rows as a two-line CSV.
std::string flat_csv(const ordered_json& j) {
  std::string head, row;
  for (const auto& [k, v] : j.items()) {
    if (v.is_structured()) continue;
    head += (head.empty() ? "" : ",") + k;
    std::string cell = v.is_number_float() ? num(v.get<double>()) : (v.is_string() ? v.get<std::string>() : v.dump());
    row += (row.empty() ? "" : ",") + cell;
  }
  return head + "\n" + row + "\n";
}

GammaParam need_gamma(const RunConfig& c) {
  if (!c.gamma) throw Validation("--gamma is required");
  return GammaParam(*c.gamma);
}

std::vector<CantorPoint> collect_points(const RunConfig& c, std::size_t default_bits) {
  std::vector<CantorPoint> pts;
  for (const auto& s : c.points) pts.push_back(CantorPoint::parse(s));
  if (c.all) {
    if (!c.level || *c.level == 0 || *c.level > 12) throw Validation("--all needs 1 <= --level <= 12");
    for (std::uint64_t i = 0; i < (std::uint64_t{1} << *c.level); ++i) pts.push_back(CantorPoint::from_index(i, *c.level));
  }
  if (c.random) {
    const std::size_t bits = c.level.value_or(default_bits);
    if (bits == 0) throw Validation("--level must be positive for random points");
    std::mt19937_64 rng(c.seed);
    for (std::size_t i = 0; i < c.random; ++i) {
      CantorPoint x;
      for (std::size_t n = 1; n <= bits; ++n) x.set_coordinate(n, static_cast<int>(rng() & 1U));
      pts.push_back(x);
    }
  }
  if (pts.empty()) throw Validation("give --points, --random or --all");
  return pts;
}

State parse_state(const std::string& s, std::size_t level) {
  if (s == "tau") return State::uniform(level);
  if (s.rfind("cyl:", 0) == 0) {
    const CantorPoint x = CantorPoint::parse(s.substr(4));
    const std::size_t n = s.size() - 4;
    if (n > level) throw Validation("cylinder prefix is longer than --level");
    return State::cylinder(x, n, level);
  }
  const CantorPoint x = CantorPoint::parse(s);
  if (x.highest_set() > level) throw Validation("point " + s + " does not fit in --level");
  return State::point(x, level);
}

struct Output {
  ordered_json json;
  std::string csv;
  int code = 0;
};

Output cmd_metric(const RunConfig& c) {
  const GammaParam g = need_gamma(c);
  const auto pts = collect_points(c, 8);
  std::size_t width = 1;
  for (const auto& x : pts) width = std::max({width, x.support_level(), x.highest_set()});
  std::vector<std::string> labels;
  for (const auto& x : pts) labels.push_back(x.to_string(width));
  const std::size_t k = pts.size();

  Output o;
  ordered_json delta = ordered_json::array();
  std::ostringstream csv;
  for (const auto& l : labels) csv << "," << l;
  csv << "\n";
  for (std::size_t i = 0; i < k; ++i) {
    ordered_json row = ordered_json::array();
    csv << labels[i];
    for (std::size_t j = 0; j < k; ++j) {
      const double d = delta_gamma(pts[i], pts[j], g);
      row.push_back(d);
      csv << "," << num(d);
    }
    csv << "\n";
    delta.push_back(row);
  }
  o.json["labels"] = labels;
  o.json["delta"] = delta;

  ordered_json violations = ordered_json::array();
  if (c.connes) {
    const std::size_t N = c.level.value_or(width);
    if (N < width) throw Validation("--level is smaller than the point length");
    const auto t = build_triple(N, DiracSpec::geometric(g));
    ordered_json rows = ordered_json::array();
    csv << "\ni,j,m,lower,upper,bound_lower,bound_upper,violation\n";
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const auto m = first_disagreement(pts[i], pts[j]);
        if (!m) continue;
        const auto r = connes_distance(t, State::point(pts[i], N), State::point(pts[j], N));
        const double lo = 2.0 * std::pow(g.value(), static_cast<double>(*m) - 1.0);
        const double hi = lo / ((1.0 - g.value()) * (1.0 - g.value()));
        const bool bad = r.value < lo * (1.0 - 1e-12) || r.upper_bound > hi + 1e-7 || r.witness_norm > 1.0 + 1e-9;
        ordered_json e;
        e["i"] = i;
        e["j"] = j;
        e["m"] = *m;
        e["lower"] = r.value;
        e["upper"] = r.upper_bound;
        e["bound_lower"] = lo;
        e["bound_upper"] = hi;
        e["converged"] = r.converged;
        rows.push_back(e);
        if (bad) violations.push_back(e);
        csv << i << "," << j << "," << *m << "," << num(r.value) << "," << num(r.upper_bound) << "," << num(lo) << ","
            << num(hi) << "," << (bad ? 1 : 0) << "\n";
      }
    }
    o.json["level"] = N;
    o.json["connes"] = rows;
  }
  o.json["violations"] = violations;
  o.csv = csv.str();
  o.code = violations.empty() ? 0 : 1;
  return o;
}

Output cmd_connes(const RunConfig& c) {
  const GammaParam g = need_gamma(c);
  if (!c.level) throw Validation("--level is required");
  if (c.phi.empty() || c.psi.empty()) throw Validation("--phi and --psi are required");
  const std::size_t N = *c.level;
  const auto t = build_triple(N, DiracSpec::geometric(g));
  const State phi = parse_state(c.phi, N), psi = parse_state(c.psi, N);
  const auto r = connes_distance(t, phi, psi);
  Output o;
  o.json["lower"] = r.value;
  o.json["upper"] = r.upper_bound;
  if (r.analytic_upper) o.json["analytic_upper"] = *r.analytic_upper;
  o.json["witness_norm"] = r.witness_norm;
  o.json["iterations"] = r.iterations;
  o.json["converged"] = r.converged;
  o.csv = flat_csv(o.json);
  o.code = r.witness_norm <= 1.0 + 1e-9 && r.value <= r.upper_bound * (1.0 + 1e-12) ? 0 : 1;
  return o;
}

Output cmd_embed(const RunConfig& c) {
  Output o;
  if (!c.vector.empty()) {
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(c.vector.data(), static_cast<Eigen::Index>(c.vector.size()));
    const auto m = universal_space_membership(v, c.tol);
    const char* kind = m.kind == Membership::scaled_cantor ? "scaled_cantor" : (m.kind == Membership::e1 ? "e1" : "outside");
    o.json["membership"] = kind;
    if (m.gamma) o.json["recovered_gamma"] = *m.gamma;
    if (m.bits) o.json["recovered_bits"] = m.bits->to_string(c.vector.size());
    if (m.kind != Membership::outside) o.json["residual"] = m.residual;
    o.json["reason"] = m.reason;
    o.csv = flat_csv(o.json);
    return o;
  }
  const GammaParam g = need_gamma(c);
  const std::size_t L = c.trunc.value_or(40);
  const auto pts = collect_points(c, 16);
  const auto lip = F_gamma_constants(g);
  o.json["e_gamma"] = e_gamma(g);
  o.json["lipschitz_lower"] = lip.lower;
  o.json["lipschitz_upper"] = lip.upper;
  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv << "point,map";
  for (std::size_t i = 1; i <= L; ++i) csv << ",c" << i;
  csv << "\n";
  for (const auto& x : pts) {
    const Eigen::VectorXd f = embed_f_gamma(x, g, L), F = embed_F_gamma(x, g, L);
    ordered_json e;
    e["point"] = x.to_string();
    e["f"] = std::vector<double>(f.data(), f.data() + f.size());
    e["F"] = std::vector<double>(F.data(), F.data() + F.size());
    rows.push_back(e);
    csv << x.to_string() << ",f";
    for (Eigen::Index i = 0; i < f.size(); ++i) csv << "," << num(f[i]);
    csv << "\n" << x.to_string() << ",F";
    for (Eigen::Index i = 0; i < F.size(); ++i) csv << "," << num(F[i]);
    csv << "\n";
  }
  o.json["points"] = rows;
  o.csv = csv.str();
  return o;
}

Output cmd_dimension(const RunConfig& c) {
  const GammaParam g = need_gamma(c);
  const std::size_t L = c.trunc.value_or(14);
  if (L < 4) throw Validation("--trunc must be at least 4");
  const auto cloud = cantor_cloud_f(g, L);
  std::vector<double> scales;
  BoxMethod method;
  if (c.method == "intervals") {
    method = BoxMethod::intervals;
    for (std::size_t n = 0; n < L; ++n) scales.push_back(std::pow(g.value(), static_cast<double>(n)));
  } else if (c.method == "grid") {
    method = BoxMethod::grid;
    for (int j = -1; j <= static_cast<int>(L) - 2; ++j) scales.push_back(std::pow(g.value(), j + 0.5) * (1.0 - g.value()));
  } else {
    throw Validation("--method must be intervals or grid");
  }
  const auto est = box_dimension(cloud, scales, method);
  const auto hb = hausdorff_bounds(g, L);
  Output o;
  o.json["slope"] = est.slope;
  o.json["expected"] = g.dimension();
  o.json["residual"] = est.residual;
  o.json["hausdorff_lower"] = hb.lower;
  o.json["hausdorff_upper"] = hb.upper;
  o.json["cover_sum"] = hb.cover_sum;
  o.json["scales"] = est.scales;
  o.json["counts"] = est.counts;
  o.csv = flat_csv(o.json);
  return o;
}

Output cmd_gh(const RunConfig& c) {
  const GammaParam g = need_gamma(c);
  if (!c.mu) throw Validation("--mu is required");
  const GammaParam mu(*c.mu);
  const std::size_t L = c.trunc.value_or(12);
  const double bound = gh_upper_bound(g, mu);
  const double tail = 2.0 * std::pow(std::max(g.value(), mu.value()), static_cast<double>(L));
  const double corr = gh_correspondence_distance(g, mu, L);
  Output o;
  o.json["kind"] = "certified upper bound";
  o.json["upper_bound"] = bound;
  o.json["correspondence_distance"] = corr;
  o.json["tail"] = tail;
  o.csv = flat_csv(o.json);
  o.code = corr <= bound + tail ? 0 : 1;
  return o;
}

Output cmd_trace(const RunConfig& c) {
  const GammaParam g = need_gamma(c);
  if (c.s.has_value() == c.p.has_value()) throw Validation("give exactly one of --s and --p");
  const auto spec = DiracSpec::geometric(g);
  const auto mult = cantor_multiplicity();
  Output o;
  const TraceResult r = c.s ? trace_power(spec, mult, *c.s, c.horizon) : trace_resolvent(spec, mult, *c.p, c.horizon);
  o.json["partial_sum"] = r.partial_sum;
  if (c.s) o.json["closed_form"] = trace_power_closed_form(g, *c.s, c.horizon);
  o.json["last_term"] = r.last_term;
  o.json["term_ratio"] = r.term_ratio;
  o.json["divergent"] = r.divergent;
  o.json["threshold"] = summability_threshold(g);
  o.csv = flat_csv(o.json);
  return o;
}

Output cmd_matrix(const RunConfig& c) {
  const auto r = verify_unithm(c.n, c.trials, c.seed);
  Output o;
  o.json["n"] = r.n;
  o.json["trials"] = r.trials;
  o.json["max_deviation"] = r.max_deviation;
  o.json["pass"] = r.pass;
  o.csv = flat_csv(o.json);
  o.code = r.pass ? 0 : 1;
  return o;
}

Output cmd_verify(const RunConfig& c, std::ostream& out) {
  AcceptanceOptions opt;
  opt.quick = c.quick;
  Output o;
  ordered_json rows = ordered_json::array();
  std::ostringstream csv;
  csv << "id,name,pass\n";
  bool all = true;
  for (int id = 1; id <= 13; ++id) {
    const auto r = run_criterion(id, opt);
    all = all && r.pass;
    if (c.format == "table") {
      out << (r.pass ? "PASS " : "FAIL ") << (id < 10 ? " " : "") << id << "  " << r.name << "  (" << num(r.seconds).substr(0, 6)
          << " s)  " << r.detail << "\n";
      out.flush();
    }
    ordered_json e;
    e["id"] = r.id;
    e["name"] = r.name;
    e["pass"] = r.pass;
    e["detail"] = r.detail;
    rows.push_back(e);
    csv << r.id << ",\"" << r.name << "\"," << (r.pass ? 1 : 0) << "\n";
  }
  o.json["criteria"] = rows;
  o.json["pass"] = all;
  o.csv = csv.str();
  o.code = all ? 0 : 1;
  return o;
}

void add_gamma(CLI::App* a, RunConfig& c) { a->add_option("--gamma", c.gamma, "scale parameter in (0, 1)"); }
void add_io(CLI::App* a, RunConfig& c, bool table = false) {
  a->add_option("--format", c.format, "output format")
      ->check(table ? CLI::IsMember({"json", "csv", "table"}) : CLI::IsMember({"json", "csv"}));
  a->add_option("--out", c.out, "write output to this file");
  a->add_option("--tol", c.tol, "tolerance")->check(CLI::PositiveNumber);
  a->add_option("--seed", c.seed, "random seed");
}
void add_points(CLI::App* a, RunConfig& c) {
  a->add_option("--points", c.points, "bit strings, coordinate 1 first")->delimiter(',');
  a->add_option("--random", c.random, "number of random points");
  a->add_flag("--all", c.all, "every point of level --level");
  a->add_option("--level", c.level, "truncation level N");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Spectral triples on the Cantor set: distances, embeddings, dimensions and traces", "spectral-cantor"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* metric = app.add_subcommand("metric", "pairwise delta_gamma and Connes brackets for point states");
  add_gamma(metric, c);
  add_points(metric, c);
  metric->add_flag("--connes", c.connes, "also compute Connes distance brackets");
  add_io(metric, c);

  auto* connes = app.add_subcommand("connes-dist", "Connes distance between two states");
  add_gamma(connes, c);
  connes->add_option("--level", c.level, "truncation level N");
  connes->add_option("--phi", c.phi, "state: bit string, tau, or cyl:<bits>");
  connes->add_option("--psi", c.psi, "state: bit string, tau, or cyl:<bits>");
  add_io(connes, c);

  auto* embed = app.add_subcommand("embed", "f_gamma and F_gamma coordinates, or membership of --vector");
  add_gamma(embed, c);
  add_points(embed, c);
  embed->add_option("--trunc", c.trunc, "truncation L");
  embed->add_option("--vector", c.vector, "coordinates to classify")->delimiter(',');
  add_io(embed, c);

  auto* dim = app.add_subcommand("dimension", "box-counting dimension and Hausdorff bounds");
  add_gamma(dim, c);
  dim->add_option("--trunc", c.trunc, "truncation L");
  dim->add_option("--method", c.method, "intervals or grid");
  add_io(dim, c);

  auto* gh = app.add_subcommand("gh-bound", "Gromov-Hausdorff upper bound");
  add_gamma(gh, c);
  gh->add_option("--mu", c.mu, "second scale parameter");
  gh->add_option("--trunc", c.trunc, "truncation L");
  add_io(gh, c);

  auto* trace = app.add_subcommand("trace", "partial traces of D^-s or (1 + D^2)^(-p/2)");
  add_gamma(trace, c);
  trace->add_option("--s", c.s, "exponent s");
  trace->add_option("--p", c.p, "exponent p");
  trace->add_option("--horizon", c.horizon, "number of eigenvalues")->check(CLI::PositiveNumber);
  add_io(trace, c);

  auto* matrix = app.add_subcommand("matrix-triple", "trace norm against the flip-commutator supremum");
  matrix->add_option("--n", c.n, "matrix size");
  matrix->add_option("--trials", c.trials, "number of random state pairs");
  add_io(matrix, c);

  auto* verify = app.add_subcommand("verify-all", "run the acceptance suite");
  verify->add_flag("--quick", c.quick, "reduced sizes");
  c.format = "table";
  add_io(verify, c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    if (argc > 1) app.exit(e, out, err);
    err << app.help();
    return 2;
  }
  c.command = app.get_subcommands().front()->get_name();
  if (c.command != "verify-all" && c.format == "table") c.format = "json";

  Output o;
  try {
    if (c.command == "metric") o = cmd_metric(c);
    else if (c.command == "connes-dist") o = cmd_connes(c);
    else if (c.command == "embed") o = cmd_embed(c);
    else if (c.command == "dimension") o = cmd_dimension(c);
    else if (c.command == "gh-bound") o = cmd_gh(c);
    else if (c.command == "trace") o = cmd_trace(c);
    else if (c.command == "matrix-triple") o = cmd_matrix(c);
    else o = cmd_verify(c, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  std::string text;
  if (c.format == "csv") {
    text = o.csv;
  } else if (c.format == "json") {
    ordered_json j;
    j["version"] = kVersion;
    j["config"] = config_json(c);
    for (const auto& [k, v] : o.json.items()) j[k] = v;
    text = j.dump(2) + "\n";
  } else {
    text = std::string(o.code == 0 ? "all criteria passed" : "some criteria failed") + "\n";
  }
  if (c.out.empty()) {
    out << text;
  } else {
    std::ofstream f(c.out);
    if (!f) {
      err << "error: cannot write " << c.out << "\n";
      return 2;
    }
    f << text;
  }
  return o.code;
}

}  // namespace spectral_cantor
