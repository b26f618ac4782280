// benchtopo command-line front end: batch ingestion, concentration metrics,
// graph analysis, simulation, parameter sweeps, and yearly analytics.
// Summaries go to stdout as JSON; tables go to files under --out.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "benchtopo/abm.hpp"
#include "benchtopo/analytics.hpp"
#include "benchtopo/csv.hpp"
#include "benchtopo/graph.hpp"
#include "benchtopo/ingest.hpp"
#include "benchtopo/metrics.hpp"
#include "benchtopo/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace benchtopo;

namespace {

constexpr std::uint64_t kDefaultSeed = 42;

struct Report {
  std::string command;
  json parameters = json::object();
  json inputs = json::array();
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  json summary = json::object();
  std::uint64_t seed = kDefaultSeed;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  void add_manifest(const SnapshotManifest& m) {
    inputs.push_back({{"source", m.source_label},
                      {"snapshot_date", format_date(m.snapshot_date)},
                      {"record_count", m.record_count},
                      {"checksum", m.checksum},
                      {"date_completions", m.date_completions}});
  }

  int finish() const {
    for (const auto& path : outputs) {
      if (!fs::exists(path)) {
        std::cerr << "error: declared output missing: " << path << "\n";
        return 1;
      }
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    json r{{"command", command}, {"parameters", parameters}, {"inputs", inputs},
           {"outputs", outputs}, {"duration_seconds", secs}, {"seed", seed},
           {"summary", summary}, {"warnings", warnings}};
    std::cout << r.dump(2) << "\n";
    return 0;
  }
};

std::string today_iso() {
  const auto now = std::chrono::system_clock::now();
  const auto days = std::chrono::floor<std::chrono::days>(now);
  return format_date(std::chrono::year_month_day{days});
}

std::ofstream open_output(Report& report, const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  fs::path full = dir / name;
  std::ofstream os(full, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + full.string());
  report.outputs.push_back(full.string());
  return os;
}

SnapshotFormat parse_format(const std::string& f) {
  return f == "json" ? SnapshotFormat::JsonLines : SnapshotFormat::Csv;
}

json table_summary(const AuthorityTable& table, std::size_t top_k,
                   std::vector<std::string>& warnings) {
  json s;
  s["entities"] = table.size();
  s["total_mass"] = table.total();
  if (table.size() >= 2 && table.total() > 0) {
    s["gini"] = gini(table.masses());
    s["hhi"] = hhi(table.masses());
  } else {
    s["gini"] = nullptr;
    s["hhi"] = table.total() > 0 ? json(1.0) : json(nullptr);
    warnings.push_back("gini undefined for fewer than 2 entities; reported as null");
  }
  const std::size_t k = std::min(top_k, table.size());
  json top = json::array();
  double cumulative = 0.0;
  if (k > 0 && table.total() > 0) {
    for (const auto& [entity, share] : top_shares(table, k)) {
      cumulative += share;
      top.push_back({{"entity", entity}, {"share", share}, {"cumulative", cumulative}});
    }
  }
  s["top_shares"] = top;
  return s;
}

void write_authority_csv(const AuthorityTable& table, std::ostream& os) {
  os << "entity,mass,share,rank\n";
  std::size_t rank = 1;
  const double total = table.total();
  for (const auto& [entity, share] : top_shares(table, table.size())) {
    os << csv::escape(entity) << ',' << csv::format_double(share * total) << ','
       << csv::format_double(share) << ',' << rank++ << '\n';
  }
}

RobustnessVariant make_variant(const std::string& kind, Date reference,
                               std::optional<double> window, std::optional<double> half_life,
                               double min_age) {
  if (kind == "baseline") return RobustnessVariant::baseline(reference);
  if (kind == "rate-per-age") return RobustnessVariant::rate_per_age(reference, min_age);
  if (kind == "windowed") {
    if (!window) throw std::invalid_argument("windowed variant requires --window-years");
    return RobustnessVariant::windowed(reference, *window);
  }
  if (kind == "exponential-decay") {
    if (!half_life) throw std::invalid_argument("decay variant requires --half-life-years");
    return RobustnessVariant::exponential_decay(reference, *half_life);
  }
  throw std::invalid_argument("unknown variant: " + kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchtopo: benchmark-ecosystem concentration metrics and simulation"};
  app.require_subcommand(1);

  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = "out";
  std::string format = "csv";
  app.add_option("--seed", seed, "Master seed (default 42; never drawn from entropy)")
      ->capture_default_str();
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", format, "Input snapshot format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // ---- authority ----
  auto* cmd_auth = app.add_subcommand("authority", "Authority allocation and concentration");
  std::string benchmarks_path, affiliations_path, snapshot_date_str = today_iso();
  std::string group_by_str = "institution", variant_str = "baseline", reference_date_str;
  double blend_alpha = 0.25, min_age = 0.25;
  std::optional<double> window_years, half_life_years;
  std::size_t top_k = 10;
  bool ablation = false;
  cmd_auth->add_option("--benchmarks", benchmarks_path, "Benchmark snapshot file")->required();
  cmd_auth->add_option("--affiliations", affiliations_path, "Affiliation sidecar (csv format)");
  cmd_auth->add_option("--snapshot-date", snapshot_date_str, "Snapshot date (default: today)");
  cmd_auth->add_option("--group-by", group_by_str, "Entity grouping")
      ->check(CLI::IsMember({"institution", "country"}))
      ->capture_default_str();
  cmd_auth->add_option("--blend-alpha", blend_alpha, "Star blend weight in authority")
      ->capture_default_str();
  cmd_auth->add_option("--variant", variant_str, "Age/recency adjustment")
      ->check(CLI::IsMember({"baseline", "rate-per-age", "windowed", "exponential-decay"}))
      ->capture_default_str();
  cmd_auth->add_option("--window-years", window_years, "Window W (windowed variant)");
  cmd_auth->add_option("--half-life-years", half_life_years, "Half-life h (decay variant)");
  cmd_auth->add_option("--min-age-years", min_age, "Age floor (rate-per-age variant)")
      ->capture_default_str();
  cmd_auth->add_option("--reference-date", reference_date_str,
                       "Age reference date (default: snapshot date)");
  cmd_auth->add_option("--top-k", top_k, "Entities in the summary ranking")
      ->capture_default_str();
  cmd_auth->add_flag("--ablation", ablation,
                     "Recompute under blend alpha in {0, 0.25, 0.5} with a stability report");

  // ---- graph ----
  auto* cmd_graph = app.add_subcommand("graph", "Tripartite graph centralities and k-core");
  std::string g_benchmarks, g_affiliations, g_snapshot_date = today_iso();
  std::size_t kcore_k = 3;
  cmd_graph->add_option("--benchmarks", g_benchmarks, "Benchmark snapshot file")->required();
  cmd_graph->add_option("--affiliations", g_affiliations, "Affiliation sidecar (csv format)");
  cmd_graph->add_option("--snapshot-date", g_snapshot_date, "Snapshot date (default: today)");
  cmd_graph->add_option("--kcore-k", kcore_k, "Core order for betweenness")
      ->capture_default_str();

  // ---- simulate ----
  auto* cmd_sim = app.add_subcommand("simulate", "Single agent-based model run");
  SimConfig sim_cfg;
  sim_cfg.matthew_alpha = 1.5;
  double tail_fraction = 0.1;
  std::string decay_mode = "subtractive";
  cmd_sim->add_option("--alpha", sim_cfg.matthew_alpha, "Attachment exponent")
      ->capture_default_str();
  cmd_sim->add_option("--beta", sim_cfg.overfit_beta, "Over-fit penalty")->capture_default_str();
  cmd_sim->add_option("--gamma", sim_cfg.entry_gamma, "New-benchmark probability")
      ->capture_default_str();
  cmd_sim->add_option("--delta", sim_cfg.decay_delta, "Debt decay")->capture_default_str();
  cmd_sim->add_option("--steps", sim_cfg.steps, "Steps")->capture_default_str();
  cmd_sim->add_option("--initial", sim_cfg.initial_benchmarks, "Initial benchmarks")
      ->capture_default_str();
  cmd_sim->add_option("--tail-fraction", tail_fraction, "Steady-state tail fraction")
      ->capture_default_str();
  cmd_sim->add_option("--decay-mode", decay_mode, "Debt decay law")
      ->check(CLI::IsMember({"subtractive", "multiplicative"}))
      ->capture_default_str();

  // ---- sweep ----
  auto* cmd_sweep = app.add_subcommand("sweep", "(beta, gamma) phase diagram and tipping contour");
  double beta_min = 0.0, beta_max = 0.05, gamma_min = 1e-6, gamma_max = 2e-3, level = 0.5;
  std::size_t beta_count = 11, gamma_count = 25, replicates = 16;
  unsigned jobs = 1;
  SimConfig sweep_base;
  sweep_base.matthew_alpha = 1.5;
  double sweep_tail = 0.1;
  std::string sweep_decay = "subtractive";
  cmd_sweep->add_option("--beta-min", beta_min)->capture_default_str();
  cmd_sweep->add_option("--beta-max", beta_max)->capture_default_str();
  cmd_sweep->add_option("--beta-count", beta_count)->capture_default_str();
  cmd_sweep->add_option("--gamma-min", gamma_min)->capture_default_str();
  cmd_sweep->add_option("--gamma-max", gamma_max)->capture_default_str();
  cmd_sweep->add_option("--gamma-count", gamma_count)->capture_default_str();
  cmd_sweep->add_option("--replicates", replicates)->capture_default_str();
  cmd_sweep->add_option("--jobs", jobs, "Worker threads (results independent of this)")
      ->capture_default_str();
  cmd_sweep->add_option("--alpha", sweep_base.matthew_alpha)->capture_default_str();
  cmd_sweep->add_option("--delta", sweep_base.decay_delta)->capture_default_str();
  cmd_sweep->add_option("--steps", sweep_base.steps)->capture_default_str();
  cmd_sweep->add_option("--initial", sweep_base.initial_benchmarks)->capture_default_str();
  cmd_sweep->add_option("--tail-fraction", sweep_tail)->capture_default_str();
  cmd_sweep->add_option("--level", level, "Contour level")->capture_default_str();
  cmd_sweep->add_option("--decay-mode", sweep_decay)
      ->check(CLI::IsMember({"subtractive", "multiplicative"}))
      ->capture_default_str();

  // ---- analytics ----
  auto* cmd_ana = app.add_subcommand("analytics", "Yearly indicators, PCA, country Pareto");
  std::string a_models, a_benchmarks, a_affiliations, a_snapshot_date = today_iso();
  std::size_t n_components = 2;
  double a_blend_alpha = 0.25;
  cmd_ana->add_option("--models", a_models, "Model snapshot file")->required();
  cmd_ana->add_option("--benchmarks", a_benchmarks, "Benchmark snapshot (Pareto + trend)");
  cmd_ana->add_option("--affiliations", a_affiliations, "Affiliation sidecar (csv format)");
  cmd_ana->add_option("--snapshot-date", a_snapshot_date, "Snapshot date (default: today)");
  cmd_ana->add_option("--components", n_components, "Retained principal components")
      ->capture_default_str();
  cmd_ana->add_option("--blend-alpha", a_blend_alpha, "Star blend weight for the trend series")
      ->capture_default_str();

  // ---- validate ----
  auto* cmd_val = app.add_subcommand("validate", "Ingest-only dry run");
  std::string v_models, v_benchmarks, v_affiliations, v_aliases, v_snapshot_date = today_iso();
  cmd_val->add_option("--models", v_models, "Model snapshot file");
  cmd_val->add_option("--benchmarks", v_benchmarks, "Benchmark snapshot file");
  cmd_val->add_option("--affiliations", v_affiliations, "Affiliation sidecar (csv format)");
  cmd_val->add_option("--aliases", v_aliases, "Alias table");
  cmd_val->add_option("--snapshot-date", v_snapshot_date, "Snapshot date (default: today)");

  CLI11_PARSE(app, argc, argv);

  Report report;
  report.seed = seed;
  const fs::path out{out_dir};

  try {
    if (app.got_subcommand(cmd_auth)) {
      report.command = "authority";
      const Date snapshot = parse_date(snapshot_date_str);
      const Date reference =
          reference_date_str.empty() ? snapshot : parse_date(reference_date_str);
      auto [records, manifest] =
          load_benchmarks(benchmarks_path, parse_format(format), snapshot, affiliations_path);
      report.add_manifest(manifest);
      const GroupBy group =
          group_by_str == "country" ? GroupBy::Country : GroupBy::Institution;
      auto variant = make_variant(variant_str, reference, window_years, half_life_years, min_age);
      report.parameters = {{"group_by", group_by_str},
                           {"blend_alpha", blend_alpha},
                           {"variant", variant_str},
                           {"reference_date", format_date(reference)},
                           {"top_k", top_k},
                           {"ablation", ablation}};

      auto table = allocate_authority(records, variant, blend_alpha, group);
      auto os = open_output(report, out, "authority.csv");
      write_authority_csv(table, os);
      report.summary = table_summary(table, top_k, report.warnings);

      if (ablation) {
        const std::vector<double> alphas = {0.0, 0.25, 0.5};
        std::vector<AuthorityTable> tables;
        for (double a : alphas) {
          tables.push_back(allocate_authority(records, variant, a, group));
          std::ostringstream name;
          name << "authority_alpha" << csv::format_double(a) << ".csv";
          auto aos = open_output(report, out, name.str());
          write_authority_csv(tables.back(), aos);
        }
        json stability = json::array();
        for (std::size_t i = 0; i < alphas.size(); ++i)
          for (std::size_t j = i + 1; j < alphas.size(); ++j) {
            json entry{{"alpha_a", alphas[i]}, {"alpha_b", alphas[j]}};
            entry["hhi_a"] = tables[i].size() >= 1 ? json(hhi(tables[i].masses())) : json(nullptr);
            entry["hhi_b"] = tables[j].size() >= 1 ? json(hhi(tables[j].masses())) : json(nullptr);
            const std::size_t kj = std::min<std::size_t>(10, tables[i].size());
            const std::size_t ks = std::min<std::size_t>(20, tables[i].size());
            if (kj >= 1) entry["jaccard_top10"] = jaccard_top_k(tables[i], tables[j], kj);
            try {
              entry["spearman_top20_union"] = spearman_top_union(tables[i], tables[j], ks);
            } catch (const std::exception& e) {
              entry["spearman_top20_union"] = nullptr;
              report.warnings.push_back(std::string("spearman unavailable: ") + e.what());
            }
            stability.push_back(entry);
          }
        report.summary["ablation_stability"] = stability;
      }
    } else if (app.got_subcommand(cmd_graph)) {
      report.command = "graph";
      const Date snapshot = parse_date(g_snapshot_date);
      auto [records, manifest] =
          load_benchmarks(g_benchmarks, parse_format(format), snapshot, g_affiliations);
      report.add_manifest(manifest);
      report.parameters = {{"kcore_k", kcore_k}};

      auto g = build_graph(records);
      {
        auto os = open_output(report, out, "edges.tsv");
        write_edge_list(g, os);
      }
      {
        auto os = open_output(report, out, "degree_centrality.csv");
        os << "kind,label,degree,centrality\n";
        auto cent = degree_centrality(g);
        std::vector<std::uint32_t> order(g.node_count());
        for (std::uint32_t i = 0; i < g.node_count(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
          if (cent[a] != cent[b]) return cent[a] > cent[b];
          const auto &na = g.node(a), &nb = g.node(b);
          if (na.kind != nb.kind) return na.kind < nb.kind;
          return na.label < nb.label;
        });
        for (auto id : order)
          os << to_string(g.node(id).kind) << ',' << csv::escape(g.node(id).label) << ','
             << g.degree(id) << ',' << csv::format_double(cent[id]) << '\n';
      }
      auto core = k_core(g, kcore_k);
      {
        auto os = open_output(report, out, "kcore_betweenness.csv");
        os << "kind,label,betweenness\n";
        if (core.node_count() > 0) {
          auto bc = betweenness(core);
          std::vector<std::uint32_t> order(core.node_count());
          for (std::uint32_t i = 0; i < core.node_count(); ++i) order[i] = i;
          std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (bc[a] != bc[b]) return bc[a] > bc[b];
            const auto &na = core.node(a), &nb = core.node(b);
            if (na.kind != nb.kind) return na.kind < nb.kind;
            return na.label < nb.label;
          });
          for (auto id : order)
            os << to_string(core.node(id).kind) << ',' << csv::escape(core.node(id).label) << ','
               << csv::format_double(bc[id]) << '\n';
        } else {
          report.warnings.push_back("k-core is empty at k=" + std::to_string(kcore_k));
        }
      }
      report.summary = {{"nodes", g.node_count()},
                        {"edges", g.edge_count()},
                        {"degree_gini", g.edge_count() ? json(degree_gini(g)) : json(nullptr)},
                        {"kcore", {{"k", kcore_k},
                                   {"nodes", core.node_count()},
                                   {"edges", core.edge_count()}}}};
    } else if (app.got_subcommand(cmd_sim)) {
      report.command = "simulate";
      sim_cfg.seed = seed;
      sim_cfg.debt_decay =
          decay_mode == "multiplicative" ? DebtDecay::Multiplicative : DebtDecay::Subtractive;
      report.parameters = {{"alpha", sim_cfg.matthew_alpha}, {"beta", sim_cfg.overfit_beta},
                           {"gamma", sim_cfg.entry_gamma},   {"delta", sim_cfg.decay_delta},
                           {"steps", sim_cfg.steps},         {"initial", sim_cfg.initial_benchmarks},
                           {"tail_fraction", tail_fraction}, {"decay_mode", decay_mode}};
      auto traj = run(sim_cfg);
      {
        auto os = open_output(report, out, "trajectory_config.json");
        json cfg{{"alpha", sim_cfg.matthew_alpha}, {"beta", sim_cfg.overfit_beta},
                 {"gamma", sim_cfg.entry_gamma},   {"delta", sim_cfg.decay_delta},
                 {"steps", sim_cfg.steps},         {"initial", sim_cfg.initial_benchmarks},
                 {"seed", sim_cfg.seed},           {"decay_mode", decay_mode}};
        os << cfg.dump(2) << "\n";
      }
      {
        auto os = open_output(report, out, "trajectory.csv");
        os << "step,n_benchmarks,hhi\n";
        for (std::size_t t = 0; t < traj.hhi_per_step.size(); ++t)
          os << (t + 1) << ',' << traj.population_per_step[t] << ','
             << csv::format_double(traj.hhi_per_step[t]) << '\n';
      }
      report.summary = {{"final_hhi", traj.hhi_per_step.back()},
                        {"steady_state_hhi", steady_state_hhi(traj, tail_fraction)},
                        {"benchmarks", traj.final_state.authority.size()}};
    } else if (app.got_subcommand(cmd_sweep)) {
      report.command = "sweep";
      SweepGrid grid;
      grid.beta_values = SweepGrid::linspace(beta_min, beta_max, beta_count);
      grid.gamma_values = SweepGrid::logspace(gamma_min, gamma_max, gamma_count);
      grid.replicates = replicates;
      grid.base_config = sweep_base;
      grid.base_config.seed = seed;
      grid.base_config.debt_decay =
          sweep_decay == "multiplicative" ? DebtDecay::Multiplicative : DebtDecay::Subtractive;
      report.parameters = {{"beta", {{"min", beta_min}, {"max", beta_max}, {"count", beta_count}}},
                           {"gamma", {{"min", gamma_min}, {"max", gamma_max}, {"count", gamma_count}}},
                           {"replicates", replicates},
                           {"jobs", jobs},
                           {"alpha", sweep_base.matthew_alpha},
                           {"delta", sweep_base.decay_delta},
                           {"steps", sweep_base.steps},
                           {"initial", sweep_base.initial_benchmarks},
                           {"tail_fraction", sweep_tail},
                           {"level", level},
                           {"decay_mode", sweep_decay}};
      auto diagram = run_sweep(grid, jobs, sweep_tail);
      auto contour = tipping_contour(diagram, level);
      {
        auto os = open_output(report, out, "phase.csv");
        write_phase_csv(diagram, os);
      }
      {
        auto os = open_output(report, out, "tipping.csv");
        write_contour_csv(contour, os);
      }
      report.summary = {{"cells", grid.beta_values.size() * grid.gamma_values.size()},
                        {"contour_points", contour.points.size()}};
      try {
        report.summary["beta_sensitivity"] = beta_sensitivity(diagram, level);
      } catch (const std::exception& e) {
        report.summary["beta_sensitivity"] = nullptr;
        report.warnings.push_back(std::string("beta_sensitivity unavailable: ") + e.what());
      }
    } else if (app.got_subcommand(cmd_ana)) {
      report.command = "analytics";
      const Date snapshot = parse_date(a_snapshot_date);
      auto [models, mmanifest] = load_models(a_models, parse_format(format), snapshot);
      report.add_manifest(mmanifest);
      report.parameters = {{"components", n_components}, {"blend_alpha", a_blend_alpha}};

      auto indicators = derive_indicators(models);
      auto result = pca(indicators, n_components);
      {
        auto os = open_output(report, out, "indicators.csv");
        os << "year";
        for (auto* n : kIndicatorNames) os << ',' << n;
        os << '\n';
        for (std::size_t r = 0; r < indicators.years.size(); ++r) {
          os << indicators.years[r];
          for (double v : indicators.metrics[r]) os << ',' << csv::format_double(v);
          os << '\n';
        }
      }
      {
        auto os = open_output(report, out, "pca_loadings.csv");
        os << "component,metric,loading\n";
        for (std::size_t k = 0; k < result.components.size(); ++k)
          for (std::size_t c = 0; c < result.components[k].size(); ++c)
            os << (k + 1) << ',' << kIndicatorNames[c] << ','
               << csv::format_double(result.components[k][c]) << '\n';
      }
      {
        auto os = open_output(report, out, "pca_scores.csv");
        os << "year";
        for (std::size_t k = 0; k < result.components.size(); ++k) os << ",pc" << (k + 1);
        os << '\n';
        for (std::size_t r = 0; r < indicators.years.size(); ++r) {
          os << indicators.years[r];
          for (double v : result.scores[r]) os << ',' << csv::format_double(v);
          os << '\n';
        }
      }
      report.summary["explained_variance_ratio"] = result.explained_variance_ratio;
      if (result.explained_variance_ratio.size() >= 2)
        report.summary["top2_ratio_sum"] =
            result.explained_variance_ratio[0] + result.explained_variance_ratio[1];

      if (!a_benchmarks.empty()) {
        auto [records, bmanifest] =
            load_benchmarks(a_benchmarks, parse_format(format), snapshot, a_affiliations);
        report.add_manifest(bmanifest);
        auto pareto = country_pareto(records);
        {
          auto os = open_output(report, out, "country_pareto.csv");
          os << "country,count,cumulative_share\n";
          for (const auto& row : pareto.rows)
            os << csv::escape(row.country) << ',' << csv::format_double(row.count) << ','
               << csv::format_double(row.cumulative_share) << '\n';
        }
        report.summary["country_gini"] = pareto.gini;

        // Yearly concentration trend: per release year, allocate authority
        // over institutions and track gini/hhi of the resulting shares.
        std::map<int, std::vector<BenchmarkRecord>> by_year;
        for (const auto& rec : records) by_year[int(rec.release_date.year())].push_back(rec);
        ConcentrationSeries gini_series, hhi_series;
        for (const auto& [year, recs] : by_year) {
          auto table = allocate_authority(recs, RobustnessVariant::baseline(snapshot),
                                          a_blend_alpha, GroupBy::Institution);
          if (table.size() < 2 || !(table.total() > 0)) {
            report.warnings.push_back("trend: skipping year " + std::to_string(year) +
                                      " (fewer than 2 entities with mass)");
            continue;
          }
          const double g = gini(table.masses());
          const double h = hhi(table.masses());
          if (g > 0) gini_series.points.emplace_back(year, g);
          hhi_series.points.emplace_back(year, h);
        }
        json trend;
        auto fit_to_json = [&](const ConcentrationSeries& s, const char* label) -> json {
          if (s.points.size() < 3) {
            report.warnings.push_back(std::string("trend: not enough ") + label +
                                      " points for a fit");
            return nullptr;
          }
          auto f = trend_fit(s);
          return {{"annual_change_rate", f.annual_change_rate},
                  {"ci95", {f.ci_low, f.ci_high}},
                  {"years", s.points.size()}};
        };
        trend["gini"] = fit_to_json(gini_series, "gini");
        trend["hhi"] = fit_to_json(hhi_series, "hhi");
        report.summary["trend"] = trend;
      }
    } else if (app.got_subcommand(cmd_val)) {
      report.command = "validate";
      const Date snapshot = parse_date(v_snapshot_date);
      if (v_models.empty() && v_benchmarks.empty())
        throw std::invalid_argument("validate: provide --models and/or --benchmarks");
      if (!v_models.empty()) {
        auto [models, manifest] = load_models(v_models, parse_format(format), snapshot);
        report.add_manifest(manifest);
        report.summary["models"] = models.size();
      }
      if (!v_benchmarks.empty()) {
        auto [records, manifest] =
            load_benchmarks(v_benchmarks, parse_format(format), snapshot, v_affiliations);
        if (!v_aliases.empty()) {
          auto aliases = AliasTable::load_csv(v_aliases);
          dedupe_entities(records, aliases);
          report.summary["aliases_applied"] = true;
        }
        report.add_manifest(manifest);
        report.summary["benchmarks"] = records.size();
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return report.finish();
}
