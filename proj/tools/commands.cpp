#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nads/chaos.hpp"
#include "nads/descriptor.hpp"
#include "nads/parallel.hpp"

namespace nads::cli {

namespace {

using nlohmann::json;

struct Config {
  std::string command;
  std::string descriptor;
  std::string pair;
  bool schedule_pair = false;
  std::size_t horizon = 10'000;
  std::optional<std::size_t> burn_in;
  std::size_t n_min = 1;
  std::size_t n_max = 8;
  std::string eps = "1/20";
  std::string t_grid = "log:32:0.001:1";
  double delta = 0.05;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::size_t jobs = default_jobs();
  std::optional<std::size_t> budget;
  std::size_t pairs = 100;
  std::string method = "lap_exact";
  std::size_t grid_intervals = 10'000;
  std::string tol = "1/20";
  std::size_t n_from = 5;
  std::size_t n_to = 10;
  std::string kind;
  std::size_t N = 0;
  std::size_t N0 = 0;
  std::string tail_map;
  std::string schedule;
  std::string height = "1";
  std::string metric = "sup";
  std::size_t depth = 64;
  std::size_t scan_max = 64;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  return parts;
}

std::vector<Rational> rational_list(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& p : split(s, ',')) out.push_back(parse_rational(p));
  if (out.empty()) throw InvalidInput("empty list: " + s);
  return out;
}

json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(what + " is not valid JSON: " + e.what());
  }
}

AnySystem load(const Config& c) {
  if (c.descriptor.empty()) throw InvalidInput("--descriptor is required");
  if (c.descriptor.front() == '{') return system_from_json(parse_json_text(c.descriptor, "--descriptor"));
  return load_descriptor(c.descriptor);
}

System load_interval(const Config& c) {
  auto s = load(c);
  if (auto* sys = std::get_if<System>(&s)) return *sys;
  throw InvalidInput("this command needs an interval system");
}

PLMap map_arg(const std::string& text) {
  if (text == "identity" || text == "tent" || text == "reflection") return plmap_from_json(json(text));
  return plmap_from_json(parse_json_text(text, "map"));
}

// Writes the main output to --out (or the given stream) and the sidecar to <out>.json,
// or as a trailing "# result:" line when writing to the stream.
void emit(const Config& c, std::ostream& out, const std::string& body, const json& sidecar) {
  if (c.out.empty()) {
    out << body;
    if (!sidecar.is_null()) out << "# result: " << sidecar.dump() << '\n';
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw InvalidInput("cannot write " + c.out);
  f << body;
  if (!sidecar.is_null()) {
    std::ofstream s(c.out + ".json", std::ios::binary);
    if (!s) throw InvalidInput("cannot write " + c.out + ".json");
    s << sidecar.dump(2) << '\n';
  }
}

json base_config(const Config& c, const AnySystem& s) {
  return {{"command", c.command}, {"descriptor", to_json(s)}};
}

struct IntervalPair {
  Rational x, y;
  json echo;
};

IntervalPair schedule_pair(const System& s, std::size_t horizon) {
  auto sched = ItinerarySchedule::for_horizon(horizon);
  auto tp = tent_pair_from_schedule(sched, sched.total());
  json echo = {{"schedule", sched.blocks}, {"depth", tp.depth}};
  if (auto* w = dynamic_cast<const WindowSpliceRule*>(&s.rule())) {
    tp.x = transport_into_window(tp.x, w->eps());
    tp.y = transport_into_window(tp.y, w->eps());
    echo["transport_eps"] = to_string(w->eps());
  }
  return {tp.x, tp.y, echo};
}

IntervalPair explicit_pair(const std::string& text) {
  auto parts = split(text, ',');
  if (parts.size() != 2) throw InvalidInput("--pair must be x,y");
  Rational x = parse_rational(parts[0]), y = parse_rational(parts[1]);
  if (x < 0 || x > 1 || y < 0 || y > 1) throw InvalidInput("pair coordinates must lie in [0,1]");
  return {x, y, json::array({to_string(x), to_string(y)})};
}

CantorPoint code_arg(const std::string& bits, std::size_t depth) {
  if (bits.size() != depth) throw InvalidInput("code length must equal the system depth");
  std::vector<int> b;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw InvalidInput("codes are strings of 0 and 1");
    b.push_back(ch - '0');
  }
  return CantorPoint(b);
}

json profile_sidecar(const PairVerdict& v) {
  json j = {{"x", v.x},
            {"y", v.y},
            {"verdict", to_string(v.verdict)},
            {"horizon", v.profile.horizon},
            {"burn_in", v.profile.burn_in}};
  j["t0"] = v.t0 ? json(*v.t0) : json(nullptr);
  return j;
}

int cmd_profile(const Config& c, std::ostream& out) {
  auto sys = load(c);
  auto grid = parse_t_grid(c.t_grid);
  json cfg = base_config(c, sys);
  cfg.update({{"horizon", c.horizon}, {"t_grid", c.t_grid}, {"delta", c.delta}});
  if (c.burn_in) cfg["burn_in"] = *c.burn_in;

  DistributionalProfile prof;
  std::string xs, ys;
  if (auto* s = std::get_if<System>(&sys)) {
    IntervalPair p;
    if (c.schedule_pair) {
      p = schedule_pair(*s, c.horizon);
    } else if (!c.pair.empty()) {
      p = explicit_pair(c.pair);
    } else {
      if (!c.seed) throw InvalidInput("--seed is required when the pair is sampled");
      auto r = random_pairs(1, *c.seed).front();
      p = {r.first, r.second, json::array({to_string(r.first), to_string(r.second)})};
      cfg["seed"] = *c.seed;
    }
    cfg["pair"] = p.echo;
    auto series = distance_series(*s, p.x, p.y, c.horizon);
    prof = profile_from_series(series, grid, c.burn_in);
    xs = series.x;
    ys = series.y;
  } else {
    const auto& od = std::get<OdometerSystem>(sys);
    std::pair<CantorPoint, CantorPoint> p{CantorPoint(od.depth), CantorPoint(od.depth)};
    if (!c.pair.empty()) {
      auto parts = split(c.pair, ',');
      if (parts.size() != 2) throw InvalidInput("--pair must be x,y");
      p = {code_arg(parts[0], od.depth), code_arg(parts[1], od.depth)};
    } else {
      if (!c.seed) throw InvalidInput("--seed is required when the pair is sampled");
      p = random_code_pairs(1, od.depth, *c.seed).front();
      cfg["seed"] = *c.seed;
    }
    cfg["pair"] = json::array({p.first.to_string(), p.second.to_string()});
    auto series = distance_series(od, p.first, p.second, c.horizon);
    prof = profile_from_series(series, grid, c.burn_in);
    xs = series.x;
    ys = series.y;
  }
  auto v = classify_pair(prof, c.delta);
  v.x = xs;
  v.y = ys;
  std::ostringstream body;
  write_profile_csv(body, prof, cfg);
  emit(c, out, body.str(), profile_sidecar(v));
  return kOk;
}

int cmd_entropy(const Config& c, std::ostream& out) {
  System s = load_interval(c);
  auto ladder = rational_list(c.eps);
  auto method = separation_method_from_string(c.method);
  SeparationOptions opt;
  opt.grid_intervals = c.grid_intervals;
  auto table = entropy_estimate(s, c.n_min, c.n_max, ladder, method, opt, c.jobs);

  json cfg = base_config(c, s);
  cfg.update({{"n_min", c.n_min}, {"n_max", c.n_max}, {"eps", c.eps}, {"method", c.method}});
  if (method == SeparationMethod::grid) cfg["grid_intervals"] = c.grid_intervals;
  std::ostringstream body;
  write_entropy_csv(body, table, cfg);

  json slopes = json::array();
  for (std::size_t e = 0; e < ladder.size(); ++e)
    slopes.push_back({{"eps", to_string(ladder[e])}, {"slope", table.slopes[e]}});
  json side = {{"method", to_string(method)}, {"slopes", slopes}, {"h", table.h},
               {"note", "finite-horizon lower-bound estimate"}};
  emit(c, out, body.str(), side);
  return kOk;
}

int cmd_classify(const Config& c, std::ostream& out) {
  System s = load_interval(c);
  ConvergenceOptions opt;
  opt.tol = parse_rational(c.tol);
  opt.n_from = c.n_from;
  opt.n_to = c.n_to;
  auto rep = classify_convergence(s, opt);
  json d = json::array(), exact = json::array();
  for (const auto& r : rep.sup_dist) {
    d.push_back(to_double(r));
    exact.push_back(to_string(r));
  }
  json cfg = base_config(c, s);
  cfg.update({{"tol", c.tol}, {"n_from", c.n_from}, {"n_to", c.n_to}});
  json res = {{"config", cfg},
              {"verdict", to_string(rep.verdict)},
              {"sup_dist", d},
              {"sup_dist_exact", exact},
              {"probes", opt.probes.size()},
              {"probes_below_tol", rep.probes_below_tol}};
  emit(c, out, res.dump(2) + "\n", json(nullptr));
  return kOk;
}

int cmd_dcscan(const Config& c, std::ostream& out) {
  auto sys = load(c);
  ScanOptions opt;
  opt.horizon = c.horizon;
  opt.t_grid = parse_t_grid(c.t_grid);
  opt.delta = c.delta;
  opt.burn_in = c.burn_in;
  opt.jobs = c.jobs;
  json cfg = base_config(c, sys);
  cfg.update({{"horizon", c.horizon}, {"t_grid", c.t_grid}, {"delta", c.delta}, {"pairs", c.pairs}});
  if (c.burn_in) cfg["burn_in"] = *c.burn_in;
  if (c.pairs > 0) {
    if (!c.seed) throw InvalidInput("--seed is required for sampled pairs");
    cfg["seed"] = *c.seed;
  }

  std::vector<PairVerdict> verdicts;
  if (auto* s = std::get_if<System>(&sys)) {
    std::vector<std::pair<Rational, Rational>> pairs;
    if (c.schedule_pair) {
      auto p = schedule_pair(*s, c.horizon);
      pairs.emplace_back(p.x, p.y);
      cfg["schedule_pair"] = p.echo;
    }
    if (c.pairs > 0) {
      auto r = random_pairs(c.pairs, *c.seed);
      pairs.insert(pairs.end(), r.begin(), r.end());
    }
    verdicts = scrambled_scan(*s, pairs, opt);
  } else {
    const auto& od = std::get<OdometerSystem>(sys);
    if (c.schedule_pair) throw InvalidInput("--schedule-pair needs an interval system");
    auto pairs = c.pairs > 0 ? random_code_pairs(c.pairs, od.depth, *c.seed)
                             : std::vector<std::pair<CantorPoint, CantorPoint>>{};
    verdicts = scrambled_scan(od, pairs, opt);
  }
  auto sum = summarize(verdicts);
  std::ostringstream body;
  write_verdicts_csv(body, verdicts, cfg);
  json side = {{"pairs", verdicts.size()},
               {"DC1", sum.dc1},
               {"DC2_only", sum.dc2_only},
               {"none", sum.none},
               {"undetermined", sum.undetermined}};
  emit(c, out, body.str(), side);
  return kOk;
}

int cmd_construct(const Config& c, std::ostream& out) {
  if (c.kind.empty()) throw InvalidInput("--kind is required");
  std::optional<AnySystem> result;
  if (c.kind == "figure1") {
    result = figure1_system(Figure1Params{parse_rational(c.height)});
  } else if (c.kind == "flat_tent") {
    if (c.schedule.empty()) throw InvalidInput("--schedule is required for flat_tent");
    result = flat_tent_system(rational_list(c.schedule));
  } else if (c.kind == "odometer") {
    result = odometer_system(c.depth);
  } else if (c.kind == "constant") {
    if (c.tail_map.empty()) throw InvalidInput("--tail-map is required for constant");
    result = constant_system(map_arg(c.tail_map));
  } else if (c.kind == "shrink") {
    if (c.N == 0) throw InvalidInput("--N is required for shrink");
    result = shrink_toward_limit(load_interval(c), c.N);
  } else if (c.kind == "dc1_window") {
    result = dc1_window_splice(load_interval(c), parse_rational(c.eps));
  } else if (c.kind == "tail_splice") {
    System base = load_interval(c);
    PLMap h = c.tail_map.empty() ? (base.limit() ? *base.limit() : throw InvalidInput("--tail-map is required"))
                                 : map_arg(c.tail_map);
    std::size_t N0 = c.N0;
    if (N0 == 0) N0 = choose_splice_index(base, parse_rational(c.eps), metric_from_string(c.metric), c.scan_max).N0;
    result = splice_tail(base, h, N0);
  } else {
    throw InvalidInput("unknown kind: " + c.kind);
  }
  emit(c, out, to_json(*result).dump(2) + "\n", json(nullptr));
  return kOk;
}

int cmd_validate(const Config& c, std::ostream& out) {
  auto sys = load(c);
  json res = {{"valid", true}, {"descriptor", to_json(sys)}};
  if (auto* s = std::get_if<System>(&sys)) {
    json surj = json::array();
    for (std::size_t n = 1; n <= c.n_max; ++n) surj.push_back(is_surjective(s->member(n)));
    res["kind"] = s->rule().kind();
    res["members_checked"] = c.n_max;
    res["surjective"] = surj;
    res["has_limit"] = s->limit().has_value();
  } else {
    res["kind"] = "odometer";
  }
  emit(c, out, res.dump(2) + "\n", json(nullptr));
  return kOk;
}

void apply_budget(const Config& c) {
  if (c.budget) {
    set_breakpoint_budget(*c.budget);
    return;
  }
  if (const char* env = std::getenv("NADS_BUDGET")) {
    std::string v(env);
    if (v.empty() || !std::all_of(v.begin(), v.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
      throw InvalidInput("NADS_BUDGET must be a positive integer");
    set_breakpoint_budget(std::stoull(v));
    return;
  }
  set_breakpoint_budget(kDefaultBreakpointBudget);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Non-autonomous piecewise-linear systems: orbits, distributional chaos, entropy", "nads"};
  app.set_help_all_flag("--help-all");
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--descriptor", c.descriptor, "System descriptor: JSON file or inline JSON");
  app.add_option("--pair", c.pair, "Explicit pair x,y (rationals, or 0/1 codes on code space)");
  app.add_flag("--schedule-pair", c.schedule_pair, "Use the tent itinerary pair sized for the horizon");
  app.add_option("--horizon", c.horizon, "Orbit horizon N")->check(CLI::PositiveNumber);
  app.add_option("--burn-in", c.burn_in, "First n of the liminf/limsup window (default max(1, N/100))");
  app.add_option("--n-min", c.n_min, "Smallest n of the entropy table")->check(CLI::PositiveNumber);
  app.add_option("--n-max", c.n_max, "Largest n (entropy) / members checked (validate)")->check(CLI::PositiveNumber);
  app.add_option("--eps", c.eps, "eps value or comma list");
  app.add_option("--t-grid", c.t_grid, "log:K:a:b, lin:K:a:b or a comma list");
  app.add_option("--delta", c.delta, "Verdict threshold")->check(CLI::Range(0.0, 0.5));
  app.add_option("--seed", c.seed, "Seed for sampled pairs");
  app.add_option("--out", c.out, "Output path (sidecar JSON at <out>.json)");
  app.add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--budget", c.budget, "Breakpoint cap")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 40));
  app.add_option("--pairs", c.pairs, "Number of sampled pairs (dcscan)");
  app.add_option("--method", c.method, "grid or lap_exact");
  app.add_option("--grid-intervals", c.grid_intervals, "Probe grid resolution for the grid method")
      ->check(CLI::PositiveNumber);
  app.add_option("--tol", c.tol, "Convergence tolerance");
  app.add_option("--n-from", c.n_from, "Tail start for classify")->check(CLI::PositiveNumber);
  app.add_option("--n-to", c.n_to, "Tail end for classify")->check(CLI::PositiveNumber);
  app.add_option("--kind", c.kind, "construct: figure1|flat_tent|odometer|constant|shrink|dc1_window|tail_splice");
  app.add_option("--N", c.N, "shrink index");
  app.add_option("--N0", c.N0, "tail splice index (chosen from --eps when omitted)");
  app.add_option("--tail-map", c.tail_map, "PLMap JSON or a map name");
  app.add_option("--schedule", c.schedule, "flat_tent cut levels, comma list");
  app.add_option("--height", c.height, "figure1 tooth height");
  app.add_option("--metric", c.metric, "sup or int");
  app.add_option("--depth", c.depth, "odometer code depth")->check(CLI::PositiveNumber);
  app.add_option("--scan-max", c.scan_max, "splice index scan range")->check(CLI::PositiveNumber);

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const Config&, std::ostream&);
  };
  const Sub subs[] = {
      {"profile", "Distributional profile of a pair (CSV + verdict)", cmd_profile},
      {"entropy", "Separated-set entropy table (CSV)", cmd_entropy},
      {"classify", "Finite-horizon convergence verdict (JSON)", cmd_classify},
      {"dcscan", "Scan pairs for distributional chaos (CSV)", cmd_dcscan},
      {"construct", "Build a descriptor (JSON)", cmd_construct},
      {"validate", "Check a descriptor and its first members", cmd_validate},
  };
  for (const auto& s : subs) app.add_subcommand(s.name, s.help);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    apply_budget(c);
    for (const auto& s : subs) {
      if (app.got_subcommand(s.name)) {
        c.command = s.name;
        return s.fn(c, out);
      }
    }
    return kInvalidInput;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kBudgetExhausted;
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace nads::cli
