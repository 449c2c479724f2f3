#include "pqkant/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <set>

#include "pqkant/analysis.hpp"
#include "pqkant/function_spec.hpp"
#include "pqkant/moments.hpp"
#include "pqkant/operators.hpp"
#include "pqkant/pq_core.hpp"

namespace pqkant::cli {

using nlohmann::json;

std::vector<std::string> figure_preset_ids() { return {"fig1", "fig2", "fig3", "fig4"}; }

FigurePreset figure_preset(const std::string& id) {
  const std::vector<std::pair<double, double>> ladder = {
      {0.75, 0.70}, {0.85, 0.80}, {0.95, 0.90}, {0.999, 0.99}};
  const std::vector<std::size_t> degrees = {10, 30, 100};
  FigurePreset preset{id, {}};
  if (id == "fig1" || id == "fig2") {
    const std::size_t n = id == "fig1" ? 30 : 100;
    for (const auto& [p, q] : ladder) preset.series.push_back({p, q, n});
  } else if (id == "fig3" || id == "fig4") {
    const double p = id == "fig3" ? 0.95 : 0.999;
    const double q = id == "fig3" ? 0.90 : 0.99;
    for (const std::size_t n : degrees) preset.series.push_back({p, q, n});
  } else {
    throw ValidationError("unknown figure preset '" + id + "' (expected fig1..fig4)");
  }
  return preset;
}

void validate(const RunConfig& c) {
  static const std::set<std::string> commands = {"moments", "eval", "converge", "bounds",
                                                 "figure"};
  if (!commands.count(c.command)) throw ValidationError("unknown command '" + c.command + "'");
  if (c.p.has_value() != c.q.has_value()) {
    throw ValidationError("--p and --q must be given together");
  }
  if (c.p && !PQParams::admissible(*c.p, *c.q)) {
    throw ValidationError("(p,q) must satisfy 0 < q < p <= 1");
  }
  if (c.n == 0 || c.n > kMaxDegree) {
    throw ValidationError("--n must lie in [1, " + std::to_string(kMaxDegree) + "]");
  }
  if (c.grid < 2) throw ValidationError("--grid must be at least 2");
  if (c.format != "csv" && c.format != "json") throw ValidationError("--format must be csv or json");
  if (c.seq != "default" && c.seq != "constant") {
    throw ValidationError("--seq must be default or constant");
  }
  if (!(c.rtol > 0.0)) throw ValidationError("--rtol must be positive");
  if (c.max_terms == 0) throw ValidationError("--max-terms must be positive");
  if (c.fn_file.empty() && !FunctionSpec::in_catalog(c.fn)) {
    throw ValidationError("unknown function '" + c.fn + "'");
  }

  if (c.command == "converge") {
    if (c.n_list.empty()) throw ValidationError("--n-list must not be empty");
    for (std::size_t i = 0; i < c.n_list.size(); ++i) {
      if (c.n_list[i] == 0 || c.n_list[i] > kMaxDegree) {
        throw ValidationError("--n-list entries must lie in [1, " + std::to_string(kMaxDegree) +
                              "]");
      }
      if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) {
        throw ValidationError("--n-list must be strictly increasing");
      }
    }
    if (c.seq == "constant" && !c.p) throw ValidationError("--seq constant needs --p and --q");
  }
  if (c.command == "bounds") {
    if (c.theorem != "3.2" && c.theorem != "3.3" && c.theorem != "3.4") {
      throw ValidationError("--theorem must be 3.2, 3.3 or 3.4");
    }
    if (c.theorem == "3.3") {
      if (!c.M || !c.alpha) throw ValidationError("--theorem 3.3 needs --M and --alpha");
      if (!(*c.M > 0.0) || !(*c.alpha > 0.0 && *c.alpha <= 1.0)) {
        throw ValidationError("need M > 0 and 0 < alpha <= 1");
      }
    }
    if (!(c.C > 0.0)) throw ValidationError("--C must be positive");
  }
  if (c.command == "figure") figure_preset(c.preset);
}

void apply_config_json(const json& doc, RunConfig& c) {
  if (!doc.is_object()) throw ValidationError("config file must hold a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "p") c.p = value.get<double>();
      else if (key == "q") c.q = value.get<double>();
      else if (key == "seq") c.seq = value.get<std::string>();
      else if (key == "n") c.n = value.get<std::size_t>();
      else if (key == "n_list") c.n_list = value.get<std::vector<std::size_t>>();
      else if (key == "fn") c.fn = value.get<std::string>();
      else if (key == "fn_file") c.fn_file = value.get<std::string>();
      else if (key == "grid") c.grid = value.get<std::size_t>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "format") c.format = value.get<std::string>();
      else if (key == "theorem") c.theorem = value.is_string() ? value.get<std::string>()
                                                               : format_double(value.get<double>());
      else if (key == "M") c.M = value.get<double>();
      else if (key == "alpha") c.alpha = value.get<double>();
      else if (key == "C") c.C = value.get<double>();
      else if (key == "rtol") c.rtol = value.get<double>();
      else if (key == "max_terms") c.max_terms = value.get<std::size_t>();
      else if (key == "preset") c.preset = value.get<std::string>();
      else throw ValidationError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config file: ") + e.what());
  }
}

namespace {

IntegralOptions integral_options(const RunConfig& c) {
  IntegralOptions opts;
  opts.rtol = c.rtol;
  opts.max_terms = c.max_terms;
  return opts;
}

PQParams resolve_params(const RunConfig& c) {
  if (c.p) return PQParams(*c.p, *c.q);
  return ParamSequence::standard().at(c.n);
}

FunctionSpec load_function(const RunConfig& c) {
  if (c.fn_file.empty()) return FunctionSpec::catalog(c.fn);
  return FunctionSpec::load_csv(c.fn_file);
}

/// Tabulated inputs must cover every point the operator samples.
void require_cover(const RunConfig& c, const FunctionSpec& f, double hi) {
  if (c.fn_file.empty()) return;
  if (f.domain_lo() > 0.0 || f.domain_hi() < hi) {
    throw ParseError("function file " + c.fn_file + " covers [" + format_double(f.domain_lo()) +
                     ", " + format_double(f.domain_hi()) + "] but [0, " + format_double(hi) +
                     "] is required");
  }
}

json params_json(const RunConfig& c, const PQParams& params) {
  return {{"p", params.p()}, {"q", params.q()}, {"n", c.n}, {"grid", c.grid},
          {"rtol", c.rtol},  {"max_terms", c.max_terms},
          {"source", c.p ? "explicit" : "default-sequence"}};
}

CommandResult cmd_moments(const RunConfig& c) {
  const PQParams params = resolve_params(c);
  const PQContext ctx(params, c.n);
  CommandResult r;
  r.meta["params"] = params_json(c, params);
  r.table.columns = {"x", "m0", "m1", "m2", "central2", "delta_n", "delta_n_local", "alpha_n"};
  const double a = alpha_n(ctx, c.n);
  for (const double x : unit_grid(c.grid)) {
    const MomentSet m = moments_closed_form(ctx, c.n, x);
    r.table.add_row({x, m.m0, m.m1, m.m2, m.central2, delta_n(ctx, c.n, x),
                     delta_n_local(ctx, c.n, x), a});
  }
  return r;
}

CommandResult cmd_eval(const RunConfig& c) {
  const PQParams params = resolve_params(c);
  const PQContext ctx(params, c.n);
  const FunctionSpec f = load_function(c);
  require_cover(c, f, kantorovich_support_end(ctx, c.n));
  CommandResult r;
  r.meta["params"] = params_json(c, params);
  r.meta["params"]["fn"] = f.name();
  r.table.columns = {"x", "f", "K"};
  const auto xs = unit_grid(c.grid);
  for (const auto& point : kantorovich_eval_grid(ctx, c.n, f, xs, integral_options(c))) {
    r.table.add_row({point.x, f(point.x), point.value});
  }
  return r;
}

CommandResult cmd_converge(const RunConfig& c) {
  const ParamSequence seq = c.seq == "constant" ? ParamSequence::constant(PQParams(*c.p, *c.q))
                                                : ParamSequence::standard();
  const FunctionSpec f = load_function(c);
  for (const std::size_t n : c.n_list) {
    const PQContext ctx(seq.at(n), n);
    require_cover(c, f, kantorovich_support_end(ctx, n));
  }
  const auto xs = unit_grid(c.grid);
  const ConvergenceReport report = korovkin_run(seq, f, c.n_list, xs, integral_options(c));

  CommandResult r;
  r.meta["params"] = {{"seq", seq.label()},       {"n_list", c.n_list}, {"fn", f.name()},
                      {"grid", c.grid},           {"rtol", c.rtol},     {"max_terms", c.max_terms}};
  if (c.p) {
    r.meta["params"]["p"] = *c.p;
    r.meta["params"]["q"] = *c.q;
  }
  r.table.columns = {"n", "p", "q", "sup_error", "argmax_x", "e0_error", "e1_error", "e2_error"};
  for (const auto& e : report.entries) {
    r.table.add_row({static_cast<std::int64_t>(e.n), e.p, e.q, e.sup_error, e.argmax_x,
                     e.e0_error, e.e1_error, e.e2_error});
  }
  return r;
}

CommandResult cmd_bounds(const RunConfig& c) {
  const PQParams params = resolve_params(c);
  const PQContext ctx(params, c.n);
  const FunctionSpec f = load_function(c);
  require_cover(c, f, kantorovich_support_end(ctx, c.n));
  const BoundEvaluator evaluator(ctx, c.n, f, integral_options(c));

  CommandResult r;
  r.meta["params"] = params_json(c, params);
  r.meta["params"]["fn"] = f.name();
  r.meta["params"]["theorem"] = c.theorem;
  if (c.theorem == "3.3") {
    r.meta["params"]["M"] = *c.M;
    r.meta["params"]["alpha"] = *c.alpha;
  }
  if (c.theorem == "3.4") r.meta["params"]["C"] = c.C;
  r.meta["sampled_region"] = {0.0, evaluator.sampled_region().hi};

  r.table.columns = {"x", "actual", "bound", "bound_unit", "slack", "theorem"};
  BoundReport report;
  for (const double x : unit_grid(c.grid)) {
    BoundRow row;
    if (c.theorem == "3.2") row = evaluator.modulus(x);
    else if (c.theorem == "3.3") row = evaluator.lipschitz(x, *c.M, *c.alpha);
    else row = evaluator.local(x, c.C);
    report.rows.push_back(row);
    r.table.add_row({row.x, row.actual, row.bound, row.bound_unit, row.slack,
                     std::string(bound_label(row.kind))});
  }
  const double min_slack = report.min_slack();
  const bool informational = c.theorem == "3.4";
  r.meta["summary"] = {{"min_slack", min_slack}, {"informational", informational}};
  r.summary = "min_slack=" + format_double(min_slack) + (informational ? " (informational)" : "");
  return r;
}

CommandResult cmd_figure(const RunConfig& c) {
  const FigurePreset preset = figure_preset(c.preset);
  const FunctionSpec f = FunctionSpec::catalog("sin7");
  const auto xs = unit_grid(kFigureGrid);

  CommandResult r;
  json series = json::array();
  r.table.columns = {"series", "p", "q", "n", "x", "f", "K"};
  for (const auto& s : preset.series) {
    const std::string label =
        "p" + format_double(s.p) + "_q" + format_double(s.q) + "_n" + std::to_string(s.n);
    series.push_back({{"label", label}, {"p", s.p}, {"q", s.q}, {"n", s.n}});
    const PQContext ctx(PQParams(s.p, s.q), s.n);
    const KantorovichOperator op(ctx, s.n, f, integral_options(c));
    for (const double x : xs) {
      r.table.add_row({label, s.p, s.q, static_cast<std::int64_t>(s.n), x, f(x), op(x)});
    }
  }
  r.meta["params"] = {{"preset", preset.id}, {"fn", f.name()}, {"grid", kFigureGrid},
                      {"series", series}, {"parameter_values", "illustrative"}};
  return r;
}

}  // namespace

CommandResult execute(const RunConfig& c) {
  CommandResult r;
  if (c.command == "moments") r = cmd_moments(c);
  else if (c.command == "eval") r = cmd_eval(c);
  else if (c.command == "converge") r = cmd_converge(c);
  else if (c.command == "bounds") r = cmd_bounds(c);
  else if (c.command == "figure") r = cmd_figure(c);
  else throw ValidationError("unknown command '" + c.command + "'");
  r.meta["command"] = c.command;
  r.meta["version"] = kVersion;
  return r;
}

namespace {

struct Flags {
  std::string config;
  double p = 0.0;
  double q = 0.0;
  std::size_t n = 0;
  std::vector<std::size_t> n_list;
  std::string fn, fn_file, out, format, seq, theorem, preset;
  std::size_t grid = 0;
  double M = 0.0, alpha = 0.0, C = 0.0, rtol = 0.0;
  std::size_t max_terms = 0;
};

void add_shared_options(CLI::App& app, Flags& f) {
  app.add_option("--config", f.config, "JSON config file; flags override its values");
  app.add_option("--p", f.p, "deformation parameter p, 0 < q < p <= 1");
  app.add_option("--q", f.q, "deformation parameter q");
  app.add_option("--n", f.n, "operator degree (<= 500)");
  app.add_option("--n-list", f.n_list, "strictly increasing degrees, comma separated")
      ->delimiter(',');
  app.add_option("--fn", f.fn, "catalog function: one, t, t_sq, sin7, abs_half");
  app.add_option("--fn-file", f.fn_file, "two-column CSV (t, f(t))");
  app.add_option("--grid", f.grid, "number of x points on [0,1]");
  app.add_option("--out", f.out, "output path (default stdout)");
  app.add_option("--format", f.format, "csv or json");
  app.add_option("--seq", f.seq, "parameter sequence: default or constant");
  app.add_option("--theorem", f.theorem, "bound: 3.2, 3.3 or 3.4");
  app.add_option("--M", f.M, "Lipschitz constant");
  app.add_option("--alpha", f.alpha, "Lipschitz exponent");
  app.add_option("--C", f.C, "constant of the second-order bound");
  app.add_option("--rtol", f.rtol, "series truncation tolerance");
  app.add_option("--max-terms", f.max_terms, "series term cap");
  app.add_option("--preset", f.preset, "figure preset: fig1..fig4");
}

template <class T, class U>
void overlay(const CLI::App& app, const char* name, const T& value, U& target) {
  if (app.count(name) > 0) target = value;
}

RunConfig build_config(const CLI::App& sub, const Flags& f) {
  RunConfig c;
  c.command = sub.get_name();
  if (sub.count("--config") > 0) {
    std::ifstream in(f.config);
    if (!in) throw ParseError("cannot open config file " + f.config);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError("config file " + f.config + ": " + e.what());
    }
    apply_config_json(doc, c);
  }
  overlay(sub, "--p", f.p, c.p);
  overlay(sub, "--q", f.q, c.q);
  overlay(sub, "--n", f.n, c.n);
  overlay(sub, "--n-list", f.n_list, c.n_list);
  overlay(sub, "--fn", f.fn, c.fn);
  overlay(sub, "--fn-file", f.fn_file, c.fn_file);
  overlay(sub, "--grid", f.grid, c.grid);
  overlay(sub, "--out", f.out, c.out);
  overlay(sub, "--format", f.format, c.format);
  overlay(sub, "--seq", f.seq, c.seq);
  overlay(sub, "--theorem", f.theorem, c.theorem);
  overlay(sub, "--M", f.M, c.M);
  overlay(sub, "--alpha", f.alpha, c.alpha);
  overlay(sub, "--C", f.C, c.C);
  overlay(sub, "--rtol", f.rtol, c.rtol);
  overlay(sub, "--max-terms", f.max_terms, c.max_terms);
  overlay(sub, "--preset", f.preset, c.preset);
  return c;
}

void emit(const RunConfig& c, const CommandResult& r, std::ostream& out) {
  std::ofstream file;
  std::ostream* sink = &out;
  if (!c.out.empty()) {
    file.open(c.out, std::ios::binary);
    if (!file) throw ValidationError("cannot write output file " + c.out);
    sink = &file;
  }
  if (c.format == "json") {
    *sink << to_json(r.meta, r.table).dump(2) << '\n';
  } else {
    write_csv(*sink, r.table);
  }
  sink->flush();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"(p,q)-Bernstein-Kantorovich operators: moments, evaluation, convergence, bounds",
               "pqkant"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"moments", "closed-form moments and error scales over a grid"},
      {"eval", "evaluate the operator on a grid"},
      {"converge", "sup-norm error along a parameter sequence"},
      {"bounds", "actual error against a pointwise bound"},
      {"figure", "multi-series curves of 1 + sin 7x"}};
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_shared_options(*sub, flags);
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidation;
  }

  const auto chosen = std::find_if(subs.begin(), subs.end(), [](CLI::App* s) { return s->parsed(); });
  try {
    const RunConfig config = build_config(**chosen, flags);
    validate(config);
    const CommandResult result = execute(config);
    emit(config, result, out);
    if (!result.summary.empty()) err << result.summary << '\n';
    return kOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputFile;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace pqkant::cli
