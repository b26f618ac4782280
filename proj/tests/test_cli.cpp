// End-to-end checks of the CLI surface: subcommands, file outputs, exit
// codes, and output determinism, driven through the installed binary.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = BENCHTOPO_CLI_PATH;
const std::string kData = BENCHTOPO_DATA_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("benchtopo_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

int run_cli(const std::string& args, const fs::path& stdout_file = {}) {
  std::string cmd = kCli + " " + args;
  if (!stdout_file.empty()) cmd += " > " + stdout_file.string();
  cmd += " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sample(const char* name) { return kData + "/sample/" + name; }

}  // namespace

TEST_CASE("help exits zero and lists defaults") {
  TempDir tmp;
  auto out = tmp.path / "help.txt";
  CHECK(run_cli("--help", out) == 0);
  auto text = slurp(out);
  CHECK(text.find("authority") != std::string::npos);
  CHECK(text.find("simulate") != std::string::npos);
  CHECK(text.find("sweep") != std::string::npos);
  CHECK(run_cli("simulate --help", out) == 0);
  text = slurp(out);
  CHECK(text.find("1.5") != std::string::npos);   // alpha default
  CHECK(text.find("0.1") != std::string::npos);   // delta default
  CHECK(text.find("10000") != std::string::npos); // steps default
}

TEST_CASE("validate succeeds on the sample snapshot and fails on bad input") {
  TempDir tmp;
  CHECK(run_cli("validate --models " + sample("models.csv") + " --benchmarks " +
                    sample("benchmarks.csv") + " --affiliations " + sample("affiliations.csv") +
                    " --aliases " + sample("aliases.csv") + " --snapshot-date 2025-03-01",
                tmp.path / "report.json") == 0);

  auto bad = tmp.path / "bad.csv";
  std::ofstream(bad) << "id,name\nonly,two\n";
  CHECK(run_cli("validate --models " + bad.string() + " --snapshot-date 2025-03-01") != 0);
  CHECK(run_cli("validate --snapshot-date 2025-03-01") != 0);
}

TEST_CASE("authority writes ranked tables and a JSON summary") {
  TempDir tmp;
  auto out = tmp.path / "report.json";
  int rc = run_cli("--out " + tmp.path.string() + " authority --benchmarks " +
                       sample("benchmarks.csv") + " --affiliations " + sample("affiliations.csv") +
                       " --snapshot-date 2025-03-01 --ablation",
                   out);
  REQUIRE(rc == 0);
  auto table = slurp(tmp.path / "authority.csv");
  CHECK(table.rfind("entity,mass,share,rank\n", 0) == 0);
  CHECK(table.find("Google") != std::string::npos);
  CHECK(table.find("Unknown/unlisted") != std::string::npos);
  CHECK(fs::exists(tmp.path / "authority_alpha0.csv"));
  CHECK(fs::exists(tmp.path / "authority_alpha0.25.csv"));
  CHECK(fs::exists(tmp.path / "authority_alpha0.5.csv"));
  auto report = slurp(out);
  CHECK(report.find("\"gini\"") != std::string::npos);
  CHECK(report.find("ablation_stability") != std::string::npos);

  // Re-running reproduces the table byte for byte.
  TempDir tmp2;
  run_cli("--out " + tmp2.path.string() + " authority --benchmarks " + sample("benchmarks.csv") +
              " --affiliations " + sample("affiliations.csv") +
              " --snapshot-date 2025-03-01 --ablation",
          tmp2.path / "report.json");
  CHECK(slurp(tmp2.path / "authority.csv") == table);
}

TEST_CASE("authority reports null gini for a single entity") {
  TempDir tmp;
  auto bench = tmp.path / "one.csv";
  std::ofstream(bench) << "id,name,release_date,citations,stars,forks,watchers,open_issues,"
                          "sample_size,category,authors\n"
                       << "b1,Solo,2022-01-01,10,5,,,,,qa,Ann\n";
  auto aff = tmp.path / "oneaff.csv";
  std::ofstream(aff) << "benchmark_id,author,institution,country\nb1,Ann,Inst,US\n";
  auto out = tmp.path / "report.json";
  int rc = run_cli("--out " + tmp.path.string() + " authority --benchmarks " + bench.string() +
                       " --affiliations " + aff.string() + " --snapshot-date 2025-03-01",
                   out);
  REQUIRE(rc == 0);
  auto report = slurp(out);
  CHECK(report.find("\"gini\": null") != std::string::npos);
  CHECK(report.find("warnings") != std::string::npos);
  CHECK(report.find("\"share\": 1.0") != std::string::npos);
}

TEST_CASE("graph emits centrality files and counts") {
  TempDir tmp;
  auto out = tmp.path / "report.json";
  int rc = run_cli("--out " + tmp.path.string() + " graph --benchmarks " +
                       sample("benchmarks.csv") + " --affiliations " + sample("affiliations.csv") +
                       " --snapshot-date 2025-03-01",
                   out);
  REQUIRE(rc == 0);
  auto report = slurp(out);
  CHECK(report.find("\"nodes\": 31") != std::string::npos);
  CHECK(report.find("\"edges\": 33") != std::string::npos);
  auto dc = slurp(tmp.path / "degree_centrality.csv");
  CHECK(dc.rfind("kind,label,degree,centrality\n", 0) == 0);
  // The sample's 3-core is empty: header-only betweenness file plus warning.
  auto kb = slurp(tmp.path / "kcore_betweenness.csv");
  CHECK(kb == "kind,label,betweenness\n");
  CHECK(report.find("k-core is empty") != std::string::npos);
  CHECK(fs::exists(tmp.path / "edges.tsv"));
}

TEST_CASE("simulate honors the monopoly closed form") {
  TempDir tmp;
  auto out = tmp.path / "report.json";
  int rc = run_cli("--out " + tmp.path.string() +
                       " --seed 9 simulate --gamma 0 --initial 1 --steps 500",
                   out);
  REQUIRE(rc == 0);
  std::ifstream traj(tmp.path / "trajectory.csv");
  std::string line;
  std::getline(traj, line);
  CHECK(line == "step,n_benchmarks,hhi");
  std::size_t rows = 0;
  while (std::getline(traj, line)) {
    CHECK(line.substr(line.rfind(',') + 1) == "1");  // hhi column stays 1
    ++rows;
  }
  CHECK(rows == 500);
  CHECK(fs::exists(tmp.path / "trajectory_config.json"));
}

TEST_CASE("simulate rejects invalid ranges with a usage error") {
  TempDir tmp;
  CHECK(run_cli("--out " + tmp.path.string() + " simulate --gamma 2.0") != 0);
  CHECK(run_cli("--out " + tmp.path.string() + " simulate --delta 1.0") != 0);
}

TEST_CASE("analytics writes indicators, loadings, scores, pareto, and trend") {
  TempDir tmp;
  auto out = tmp.path / "report.json";
  int rc = run_cli("--out " + tmp.path.string() + " analytics --models " + sample("models.csv") +
                       " --benchmarks " + sample("benchmarks.csv") + " --affiliations " +
                       sample("affiliations.csv") + " --snapshot-date 2025-03-01",
                   out);
  REQUIRE(rc == 0);
  CHECK(slurp(tmp.path / "indicators.csv")
            .rfind("year,model_count,mean_log10_parameters,distinct_manufacturers,"
                   "distinct_countries,mean_modality_count,documented_share,open_weights_share,"
                   "permissive_share\n",
                   0) == 0);
  CHECK(slurp(tmp.path / "pca_loadings.csv").rfind("component,metric,loading\n", 0) == 0);
  CHECK(slurp(tmp.path / "pca_scores.csv").rfind("year,pc1,pc2\n", 0) == 0);
  CHECK(slurp(tmp.path / "country_pareto.csv").rfind("country,count,cumulative_share\n", 0) == 0);
  auto report = slurp(out);
  CHECK(report.find("top2_ratio_sum") != std::string::npos);
  CHECK(report.find("country_gini") != std::string::npos);
  CHECK(report.find("\"trend\"") != std::string::npos);
  CHECK(report.find("annual_change_rate") != std::string::npos);
}

TEST_CASE("unknown flags and missing inputs exit nonzero") {
  TempDir tmp;
  CHECK(run_cli("--out " + tmp.path.string() + " authority --benchmarks /nonexistent.csv") != 0);
  CHECK(run_cli("frobnicate") != 0);
}
