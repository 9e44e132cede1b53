// gpsel: Gaussian-process model selection via stabilized Laplace evidence.
//
// Subcommands:
//   evaluate  all selection criteria for one kernel on one dataset
//   oracle    ground-truth evidence via quadrature and/or nested sampling
//   search    greedy compositional kernel search
//   generate  GP-prior benchmark dataset factory
//   ellipse   2-sigma posterior confidence ellipses per Laplace variant
//
// Every JSON output embeds tool version, full config, and seed; CSV outputs
// carry seed/tool_version/config columns. Exit codes: 0 success, 2 config
// error, 3 numerical failure, 4 partial result.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gpsel/data.hpp"
#include "gpsel/errors.hpp"
#include "gpsel/fit.hpp"
#include "gpsel/kernels.hpp"
#include "gpsel/laplace.hpp"
#include "gpsel/model.hpp"
#include "gpsel/oracle.hpp"
#include "gpsel/rng.hpp"
#include "gpsel/search.hpp"
#include "gpsel/version.hpp"

using nlohmann::json;
using namespace gpsel;

namespace {

struct CliConfig {
  std::string command;
  std::string data;
  std::string kernel;
  std::string criterion = "LapS";
  int depth = 3;
  int restarts = 5;
  std::uint64_t seed = 0;
  std::string method = "both";
  int live_points = 400;
  double dlogz = 0.01;
  int points_per_dim = 401;
  int normalize_mode = 0;  // 0: per-source default, +1: forced on, -1: off
  bool score_evidence = false;
  bool with_samples = false;
  int jobs = 0;
  std::string format = "json";
  std::string out;
  std::string generator;
  int gen_n = 10;
};

const std::set<int> kSizePresets{5, 10, 20, 30, 40, 50, 100, 200};

json config_to_json(const CliConfig& c) {
  json j{{"command", c.command},
         {"data", c.data},
         {"kernel", c.kernel},
         {"criterion", c.criterion},
         {"depth", c.depth},
         {"restarts", c.restarts},
         {"seed", c.seed},
         {"method", c.method},
         {"live_points", c.live_points},
         {"dlogz", c.dlogz},
         {"points_per_dim", c.points_per_dim},
         {"normalize",
          c.normalize_mode == 0 ? "default" : (c.normalize_mode > 0 ? "on" : "off")},
         {"score_evidence", c.score_evidence},
         {"with_samples", c.with_samples},
         {"jobs", c.jobs},
         {"format", c.format},
         {"out", c.out}};
  if (c.command == "generate") {
    j["generator"] = c.generator;
    j["n"] = c.gen_n;
  }
  return j;
}

json envelope(const CliConfig& cfg) {
  return json{{"tool", {{"name", kToolName}, {"version", kVersion}}},
              {"command", cfg.command},
              {"seed", cfg.seed},
              {"config", config_to_json(cfg)}};
}

std::string out_stem(const CliConfig& cfg) {
  std::string out = cfg.out;
  if (out.empty()) out = "gpsel-" + cfg.command;
  if (out.ends_with(".json")) return out.substr(0, out.size() - 5);
  if (out.ends_with(".csv")) return out.substr(0, out.size() - 4);
  return out;
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write output file: " + path);
  f << content;
  if (!f) throw ConfigError("failed writing output file: " + path);
}

std::string num(double v) {
  char b[48];
  std::snprintf(b, sizeof b, "%.10g", v);
  return b;
}

std::string csv_quote(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += "\"\"";
    else q += c;
  }
  q += "\"";
  return q;
}

// ---------------------------------------------------------------------------
// Dataset resolution: CSV path | 'linear-benchmark' | gen:<EXPR>:<n>:<seed>

ExprPtr parse_generator_name(const std::string& name) {
  if (name == "LIN" || name == "SE" || name == "MAT32" || name == "SE+SE") {
    return parse_kernel(name);
  }
  throw ConfigError("unknown generator '" + name +
                    "' (supported: LIN, SE, MAT32, SE+SE)");
}

void check_size_preset(int n) {
  if (!kSizePresets.count(n)) {
    throw ConfigError("dataset size " + std::to_string(n) +
                      " is not a preset (supported: 5 10 20 30 40 50 100 200)");
  }
}

struct ResolvedData {
  Dataset data;
  json info;
  ExprPtr generating;  // set for gen: sources; enables recognition reporting
};

ResolvedData resolve_data(const CliConfig& cfg) {
  if (cfg.data.empty()) throw ConfigError("--data is required for this command");
  ResolvedData rd;
  bool default_normalize = true;
  if (cfg.data == "linear-benchmark") {
    // The built-in benchmark is consumed as-is; its reference values assume
    // raw coordinates. --normalize still applies the transform explicitly.
    rd.data = linear_benchmark_dataset();
    default_normalize = false;
    rd.info["source"] = "linear-benchmark";
  } else if (cfg.data.rfind("gen:", 0) == 0) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= cfg.data.size(); ++i) {
      if (i == cfg.data.size() || cfg.data[i] == ':') {
        parts.push_back(cfg.data.substr(start, i - start));
        start = i + 1;
      }
    }
    if (parts.size() != 4) {
      throw ConfigError("generated-data source must be gen:<EXPR>:<n>:<seed>, got '" +
                        cfg.data + "'");
    }
    GeneratorSpec spec;
    spec.expr = parse_generator_name(parts[1]);
    try {
      spec.n = std::stoi(parts[2]);
      spec.seed = std::stoull(parts[3]);
    } catch (const std::exception&) {
      throw ConfigError("bad <n> or <seed> in data source '" + cfg.data + "'");
    }
    check_size_preset(spec.n);
    rd.generating = spec.expr;
    rd.data = sample_from_gp_prior(spec);
    rd.info["source"] = cfg.data;
    rd.info["generator"] = parts[1];
    rd.info["generator_n"] = spec.n;
    rd.info["generator_seed"] = spec.seed;
  } else {
    rd.data = load_csv(cfg.data);
    rd.info["source"] = cfg.data;
  }

  const bool apply =
      cfg.normalize_mode > 0 || (cfg.normalize_mode == 0 && default_normalize);
  NormalizeRecord rec;
  if (apply) rd.data = normalize(rd.data, &rec);
  rd.info["n"] = rd.data.n();
  rd.info["normalized"] = rec.applied;
  if (rec.applied) {
    rd.info["normalize_mean"] = rec.mean;
    rd.info["normalize_stdev"] = rec.stdev;
  }
  return rd;
}

ExprPtr require_kernel(const CliConfig& cfg) {
  if (cfg.kernel.empty()) {
    throw ConfigError("--kernel is required for " + cfg.command);
  }
  return parse_kernel(cfg.kernel);
}

// ---------------------------------------------------------------------------
// Shared serializers

json fit_to_json(const FitResult& r) {
  return json{{"value", r.value},
              {"theta_hat", r.theta_hat},
              {"restart_index", r.restart_index},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"grad_norm", r.grad_norm}};
}

json eval_to_json(const EvaluationResult& r) {
  std::vector<double> eigs(r.spectrum.eigenvalues.data(),
                           r.spectrum.eigenvalues.data() + r.spectrum.u());
  json j{{"u", r.u},
         {"n", r.n},
         {"mll", r.mll},
         {"map", r.map_value},
         {"aic", r.aic},
         {"bic", r.bic},
         {"logz_aic", r.logz_aic},
         {"logz_bic", r.logz_bic},
         {"aic_map_surrogate", r.aic_map_surrogate},
         {"bic_map_surrogate", r.bic_map_surrogate},
         {"logz_laps", r.logz_laps},
         {"logz_lapaic", r.logz_lapaic},
         {"logz_lapbic", r.logz_lapbic},
         {"eigenvalues", eigs},
         {"clamped",
          {{"laps", r.clamped_laps},
           {"lapaic", r.clamped_lapaic},
           {"lapbic", r.clamped_lapbic}}},
         {"mll_fit", fit_to_json(r.mll_fit)},
         {"map_fit", fit_to_json(r.map_fit)},
         {"jitter",
          {{"escalations", r.diag.jitter_escalations},
           {"value", r.diag.jitter_used}}}};
  j["logz_lap"] = r.logz_lap ? json(*r.logz_lap) : json(nullptr);
  return j;
}

std::string provenance_columns_header() { return "seed,tool_version,config"; }

std::string provenance_columns(const CliConfig& cfg) {
  return std::to_string(cfg.seed) + "," + kVersion + "," +
         csv_quote(config_to_json(cfg).dump());
}

// ---------------------------------------------------------------------------
// evaluate

std::string evaluate_csv(const CliConfig& cfg, const EvaluationResult& r) {
  std::string csv =
      "kernel,u,n,mll,map,aic,bic,logz_aic,logz_bic,logz_lap,logz_laps,"
      "logz_lapaic,logz_lapbic,clamped_laps,clamped_lapaic,clamped_lapbic," +
      provenance_columns_header() + "\n";
  csv += csv_quote(cfg.kernel) + "," + std::to_string(r.u) + "," +
         std::to_string(r.n) + "," + num(r.mll) + "," + num(r.map_value) + "," +
         num(r.aic) + "," + num(r.bic) + "," + num(r.logz_aic) + "," +
         num(r.logz_bic) + "," + (r.logz_lap ? num(*r.logz_lap) : "") + "," +
         num(r.logz_laps) + "," + num(r.logz_lapaic) + "," +
         num(r.logz_lapbic) + "," + std::to_string(r.clamped_laps) + "," +
         std::to_string(r.clamped_lapaic) + "," +
         std::to_string(r.clamped_lapbic) + "," + provenance_columns(cfg) + "\n";
  return csv;
}

int cmd_evaluate(const CliConfig& cfg) {
  ExprPtr expr = require_kernel(cfg);
  ResolvedData rd = resolve_data(cfg);
  GPModel model{expr};
  const PriorSpec prior = build_prior(expr);
  const EvaluationResult res =
      criteria_suite(model, prior, rd.data, cfg.seed, cfg.restarts);

  json j = envelope(cfg);
  j["data"] = rd.info;
  j["kernel"] = {{"text", cfg.kernel},
                 {"render", render(expr)},
                 {"canonical", canonical_render(expr)},
                 {"size", expr_size(expr)}};
  j["result"] = eval_to_json(res);

  const std::string stem = out_stem(cfg);
  write_text(stem + ".json", j.dump(2) + "\n");
  write_text(stem + ".csv", evaluate_csv(cfg, res));
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

int cmd_oracle(const CliConfig& cfg) {
  ExprPtr expr = require_kernel(cfg);
  const bool run_quad = cfg.method == "quadrature" || cfg.method == "both";
  const bool run_nested = cfg.method == "nested" || cfg.method == "both";
  if (!run_quad && !run_nested) {
    throw ConfigError("--method must be quadrature, nested, or both; got '" +
                      cfg.method + "'");
  }
  ResolvedData rd = resolve_data(cfg);
  GPModel model{expr};
  const PriorSpec prior = build_prior(expr);
  const std::string stem = out_stem(cfg);

  json j = envelope(cfg);
  j["data"] = rd.info;
  j["kernel"] = {{"text", cfg.kernel}, {"u", prior.u()}};
  json estimates = json::array();
  std::string csv = "method,logz,error_bar,sample_count,partial," +
                    provenance_columns_header() + "\n";
  bool any_partial = false;

  if (run_quad) {
    const EvidenceEstimate q =
        quadrature_evidence(model, prior, rd.data, cfg.points_per_dim, 6.0);
    estimates.push_back({{"method", q.method},
                         {"logz", q.logz},
                         {"error_bar", q.error_bar},
                         {"sample_count", q.sample_count},
                         {"points_per_dim", cfg.points_per_dim},
                         {"half_width_sigmas", 6.0},
                         {"partial", q.partial}});
    csv += "quadrature," + num(q.logz) + ",0," + std::to_string(q.sample_count) +
           ",0," + provenance_columns(cfg) + "\n";
  }
  if (run_nested) {
    const EvidenceEstimate ns = nested_sampling_evidence(
        model, prior, rd.data, cfg.live_points, cfg.dlogz, cfg.seed);
    any_partial = any_partial || ns.partial;
    const std::string samples_path = stem + ".samples.csv";
    write_samples_csv(ns, samples_path);
    estimates.push_back({{"method", ns.method},
                         {"logz", ns.logz},
                         {"error_bar", ns.error_bar},
                         {"sample_count", ns.sample_count},
                         {"live_points", cfg.live_points},
                         {"dlogz", cfg.dlogz},
                         {"partial", ns.partial},
                         {"samples_csv", samples_path}});
    csv += "nested," + num(ns.logz) + "," + num(ns.error_bar) + "," +
           std::to_string(ns.sample_count) + "," + (ns.partial ? "1" : "0") +
           "," + provenance_columns(cfg) + "\n";
  }
  j["estimates"] = estimates;

  write_text(stem + ".json", j.dump(2) + "\n");
  if (cfg.format == "csv") write_text(stem + ".csv", csv);
  return any_partial ? 4 : 0;
}

// ---------------------------------------------------------------------------
// search

std::vector<Criterion> parse_criterion_list(const std::string& text) {
  std::vector<Criterion> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == ',') {
      const std::string name = text.substr(start, i - start);
      if (!name.empty()) out.push_back(parse_criterion(name));
      start = i + 1;
    }
  }
  if (out.empty()) throw ConfigError("--criterion needs at least one name");
  return out;
}

int cmd_search(const CliConfig& cfg) {
  if (cfg.depth < 1) throw ConfigError("--depth must be >= 1");
  ResolvedData rd = resolve_data(cfg);
  const std::vector<Criterion> crits = parse_criterion_list(cfg.criterion);
  const std::vector<ExprPtr> bases = {leaf(Base::SE), leaf(Base::LIN),
                                      leaf(Base::MAT32), leaf(Base::PER),
                                      leaf(Base::RQ)};

  json j = envelope(cfg);
  j["data"] = rd.info;
  json searches = json::array();
  std::string csv =
      "dataset,criterion,found,found_canonical,size,criterion_value,score,"
      "recognized,oracle_method,oracle_logz,oracle_error_bar,partial," +
      provenance_columns_header() + "\n";
  bool any_partial = false;

  for (const Criterion crit : crits) {
    const SearchTrace trace =
        cks_search(rd.data, crit, cfg.depth, bases, cfg.seed, cfg.restarts);
    any_partial = any_partial || trace.partial;

    json js{{"criterion", criterion_name(crit)}, {"partial", trace.partial}};
    json iters = json::array();
    const CandidateRecord* best_rec = nullptr;
    for (const SearchIteration& it : trace.iterations) {
      json cand = json::array();
      for (const CandidateRecord& cr : it.candidates) {
        json cj{{"kernel", render(cr.expr)},
                {"size", expr_size(cr.expr)},
                {"failed", cr.failed},
                {"seconds", cr.seconds}};
        if (cr.failed) {
          cj["error"] = cr.error;
        } else {
          cj["criterion_value"] = cr.criterion_value;
          cj["score"] = cr.score;
          cj["u"] = cr.eval.u;
          cj["mll"] = cr.eval.mll;
          cj["map"] = cr.eval.map_value;
        }
        cand.push_back(std::move(cj));
      }
      iters.push_back({{"candidates", std::move(cand)},
                       {"chosen_index", it.chosen_index},
                       {"accepted", it.accepted}});
      if (it.accepted && it.chosen_index >= 0) {
        best_rec = &it.candidates[it.chosen_index];
      }
    }
    js["iterations"] = std::move(iters);

    std::string found, found_canon, size_s = "", crit_val = "", score_s = "";
    std::string recognized;
    std::string oracle_method, oracle_logz, oracle_err;
    if (trace.best) {
      found = render(trace.best);
      found_canon = canonical_render(trace.best);
      size_s = std::to_string(expr_size(trace.best));
      score_s = num(trace.best_score);
      js["best"] = {{"kernel", found},
                    {"canonical", found_canon},
                    {"size", expr_size(trace.best)},
                    {"score", trace.best_score}};
      if (best_rec) {
        crit_val = num(best_rec->criterion_value);
        js["best"]["criterion_value"] = best_rec->criterion_value;
        js["best_eval"] = eval_to_json(best_rec->eval);
      }
      if (rd.generating) {
        const bool rec = recognition_check(trace.best, rd.generating);
        js["recognized"] = rec;
        recognized = rec ? "1" : "0";
      } else {
        js["recognized"] = nullptr;
      }
      if (cfg.score_evidence) {
        const int u = param_layout(trace.best).u();
        if (u <= 3) {
          GPModel bm{trace.best};
          const PriorSpec bprior = build_prior(trace.best);
          const EvidenceEstimate q = quadrature_evidence(
              bm, bprior, rd.data, cfg.points_per_dim, 6.0);
          js["oracle"] = {{"method", q.method},
                          {"logz", q.logz},
                          {"error_bar", q.error_bar},
                          {"sample_count", q.sample_count}};
          oracle_method = "quadrature";
          oracle_logz = num(q.logz);
          oracle_err = "0";
        } else {
          js["oracle"] = {{"skipped", "winner has u > 3"}};
        }
      }
    } else {
      js["best"] = nullptr;
    }
    searches.push_back(std::move(js));

    csv += csv_quote(cfg.data) + "," + criterion_name(crit) + "," +
           csv_quote(found) + "," + csv_quote(found_canon) + "," + size_s +
           "," + crit_val + "," + score_s + "," + recognized + "," +
           oracle_method + "," + oracle_logz + "," + oracle_err + "," +
           (trace.partial ? "1" : "0") + "," + provenance_columns(cfg) + "\n";
  }
  j["searches"] = std::move(searches);

  const std::string stem = out_stem(cfg);
  write_text(stem + ".json", j.dump(2) + "\n");
  write_text(stem + ".csv", csv);
  return any_partial ? 4 : 0;
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const CliConfig& cfg) {
  if (cfg.generator.empty()) {
    throw ConfigError("--generator is required (LIN, SE, MAT32, SE+SE)");
  }
  GeneratorSpec spec;
  spec.expr = parse_generator_name(cfg.generator);
  check_size_preset(cfg.gen_n);
  spec.n = cfg.gen_n;
  spec.seed = cfg.seed;
  const Dataset d = sample_from_gp_prior(spec);

  const std::string stem = out_stem(cfg);
  write_csv(d, stem + ".csv");
  json j = envelope(cfg);
  j["dataset_csv"] = stem + ".csv";
  j["generator"] = {{"expr", cfg.generator},
                    {"n", cfg.gen_n},
                    {"seed", cfg.seed},
                    {"x_lo", spec.x_lo},
                    {"x_hi", spec.x_hi},
                    {"standard_init_raw", 0.0}};
  write_text(stem + ".provenance.json", j.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// ellipse

json ellipse_to_json(const EllipseSpec& e, int clamped_count) {
  json axes = json::array();
  for (int c = 0; c < 2; ++c) {
    axes.push_back({e.axes(0, c), e.axes(1, c)});
  }
  return json{{"center", {e.center[0], e.center[1]}},
              {"axes", axes},
              {"semi_axis_lengths", {e.semi_axis_lengths[0], e.semi_axis_lengths[1]}},
              {"level", e.level},
              {"clamped_count", clamped_count}};
}

int cmd_ellipse(const CliConfig& cfg) {
  if (cfg.format != "json") {
    throw ConfigError("ellipse emits JSON only; drop --format " + cfg.format);
  }
  ExprPtr expr = require_kernel(cfg);
  if (param_layout(expr).u() != 2) {
    throw ConfigError("confidence ellipses require a model with exactly 2 "
                      "hyperparameters, kernel '" + cfg.kernel + "' has " +
                      std::to_string(param_layout(expr).u()));
  }
  ResolvedData rd = resolve_data(cfg);
  GPModel model{expr};
  const PriorSpec prior = build_prior(expr);
  const EvaluationResult res =
      criteria_suite(model, prior, rd.data, cfg.seed, cfg.restarts);
  const double level = 2.0;  // 2-sigma ellipses
  const double logn = std::log(static_cast<double>(res.n));

  struct Variant {
    const char* name;
    bool clamp;
    double r;
  };
  const Variant variants[] = {{"lap", false, 0.0},
                              {"laps", true, 0.0},
                              {"lapaic", true, -1.0},
                              {"lapbic", true, -logn}};

  json j = envelope(cfg);
  j["data"] = rd.info;
  j["kernel"] = {{"text", cfg.kernel}, {"u", res.u}};
  j["theta_hat"] = res.map_fit.theta_hat;
  j["map"] = res.map_value;
  std::vector<double> eigs(res.spectrum.eigenvalues.data(),
                           res.spectrum.eigenvalues.data() + res.spectrum.u());
  j["eigenvalues"] = eigs;

  std::vector<std::pair<std::string, HessianSpectrum>> usable;
  json ells;
  for (const Variant& v : variants) {
    if (!v.clamp) {
      if ((res.spectrum.eigenvalues.array() <= 0.0).any()) {
        ells[v.name] = nullptr;  // plain Laplace undefined here
        continue;
      }
      ells[v.name] = ellipse_to_json(
          confidence_ellipse(res.map_fit.theta_hat, res.spectrum, level), 0);
      usable.emplace_back(v.name, res.spectrum);
    } else {
      int count = 0;
      const HessianSpectrum clamped =
          clamp_eigenvalues(res.spectrum, v.r, &count);
      ells[v.name] = ellipse_to_json(
          confidence_ellipse(res.map_fit.theta_hat, clamped, level), count);
      usable.emplace_back(v.name, clamped);
    }
  }
  j["ellipses"] = std::move(ells);

  int code = 0;
  const std::string stem = out_stem(cfg);
  if (cfg.with_samples) {
    const EvidenceEstimate ns = nested_sampling_evidence(
        model, prior, rd.data, cfg.live_points, cfg.dlogz, cfg.seed);
    if (ns.partial) code = 4;
    const std::string samples_path = stem + ".samples.csv";
    write_samples_csv(ns, samples_path);

    // Fraction of posterior samples inside each 2-sigma ellipse. The primary
    // number counts raw nested-sampling samples (dead + final live points);
    // the weighted variant uses the normalized posterior weights.
    const Eigen::Vector2d c(res.map_fit.theta_hat[0], res.map_fit.theta_hat[1]);
    json frac, frac_w;
    for (const auto& [name, sp] : usable) {
      long inside = 0;
      double winside = 0.0;
      for (const PosteriorSample& s : ns.samples) {
        const Eigen::Vector2d d(s.theta[0] - c[0], s.theta[1] - c[1]);
        if (d.dot(sp.H * d) <= level * level) {
          ++inside;
          winside += std::exp(s.logweight);
        }
      }
      frac[name] = static_cast<double>(inside) /
                   static_cast<double>(ns.samples.size());
      frac_w[name] = winside;
    }
    if (ells.contains("lap") && ells["lap"].is_null()) {
      frac["lap"] = nullptr;
      frac_w["lap"] = nullptr;
    }
    j["samples"] = {{"method", ns.method},
                    {"logz", ns.logz},
                    {"error_bar", ns.error_bar},
                    {"count", ns.sample_count},
                    {"partial", ns.partial},
                    {"samples_csv", samples_path},
                    {"inside_fraction", std::move(frac)},
                    {"inside_fraction_weighted", std::move(frac_w)}};
  }

  write_text(stem + ".json", j.dump(2) + "\n");
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian-process model selection via stabilized Laplace "
               "approximations of the model evidence"};
  app.require_subcommand(1);
  CliConfig cfg;

  auto add_data = [&](CLI::App* s) {
    s->add_option("--data", cfg.data,
                  "dataset: CSV path, 'linear-benchmark', or gen:<EXPR>:<n>:<seed>");
    auto* on = s->add_flag_callback(
        "--normalize", [&cfg] { cfg.normalize_mode = 1; },
        "force y-normalization (zero mean, unit std)");
    auto* off = s->add_flag_callback(
        "--no-normalize", [&cfg] { cfg.normalize_mode = -1; },
        "disable y-normalization");
    on->excludes(off);
    off->excludes(on);
  };
  auto add_common = [&](CLI::App* s) {
    s->add_option("--seed", cfg.seed, "RNG seed (recorded in every output)");
    s->add_option("--jobs", cfg.jobs, "worker thread bound (0 = library default)");
    s->add_option("--out", cfg.out, "output path (extension derives sidecars)");
    s->add_option("--format", cfg.format, "json (default) or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  CLI::App* ev = app.add_subcommand("evaluate",
                                    "compute all selection criteria for one kernel");
  add_data(ev);
  add_common(ev);
  ev->add_option("--kernel", cfg.kernel, "kernel grammar expression");
  ev->add_option("--restarts", cfg.restarts, "optimizer restarts (prior draws)");

  CLI::App* orc = app.add_subcommand("oracle", "ground-truth evidence estimates");
  add_data(orc);
  add_common(orc);
  orc->add_option("--kernel", cfg.kernel, "kernel grammar expression");
  orc->add_option("--method", cfg.method, "quadrature, nested, or both")
      ->check(CLI::IsMember({"quadrature", "nested", "both"}));
  orc->add_option("--points-per-dim", cfg.points_per_dim,
                  "quadrature grid resolution (>= 51)");
  orc->add_option("--live-points", cfg.live_points, "nested-sampling live points");
  orc->add_option("--dlogz", cfg.dlogz, "nested-sampling stopping threshold");

  CLI::App* se = app.add_subcommand("search", "greedy compositional kernel search");
  add_data(se);
  add_common(se);
  se->add_option("--criterion", cfg.criterion,
                 "selection criterion(s), comma separated: MLL, MAP, AIC, BIC, "
                 "LapS, LapAIC, LapBIC");
  se->add_option("--depth", cfg.depth, "maximum kernel size (leaf count)");
  se->add_option("--restarts", cfg.restarts, "optimizer restarts per candidate");
  se->add_flag("--score-evidence", cfg.score_evidence,
               "append quadrature logZ of the winner when u <= 3");
  se->add_option("--points-per-dim", cfg.points_per_dim,
                 "grid resolution for --score-evidence");

  CLI::App* ge = app.add_subcommand("generate", "sample a benchmark dataset "
                                                "from a GP prior");
  ge->add_option("--generator", cfg.generator, "LIN, SE, MAT32, or SE+SE");
  ge->add_option("--n", cfg.gen_n, "dataset size preset (5 10 20 30 40 50 100 200)");
  add_common(ge);

  CLI::App* el = app.add_subcommand("ellipse",
                                    "2-sigma confidence ellipses per Laplace variant");
  add_data(el);
  add_common(el);
  el->add_option("--kernel", cfg.kernel, "kernel with exactly 2 hyperparameters");
  el->add_option("--restarts", cfg.restarts, "optimizer restarts");
  el->add_flag("--with-samples", cfg.with_samples,
               "overlay nested-sampling posterior samples and inside-fractions");
  el->add_option("--live-points", cfg.live_points, "nested-sampling live points");
  el->add_option("--dlogz", cfg.dlogz, "nested-sampling stopping threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // config-style exit for bad CLI usage
  }

  try {
#ifdef _OPENMP
    if (cfg.jobs > 0) omp_set_num_threads(cfg.jobs);
#endif
    if (ev->parsed()) {
      cfg.command = "evaluate";
      return cmd_evaluate(cfg);
    }
    if (orc->parsed()) {
      cfg.command = "oracle";
      return cmd_oracle(cfg);
    }
    if (se->parsed()) {
      cfg.command = "search";
      return cmd_search(cfg);
    }
    if (ge->parsed()) {
      cfg.command = "generate";
      return cmd_generate(cfg);
    }
    if (el->parsed()) {
      cfg.command = "ellipse";
      return cmd_ellipse(cfg);
    }
    std::cerr << "no command given\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
