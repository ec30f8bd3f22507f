#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"
#include "rcs/config.hpp"
#include "rcs/error.hpp"
#include "rcs/parallel.hpp"
#include "rcs/runner.hpp"

namespace fs = std::filesystem;
using namespace rcs;

namespace {

const char* kThreshold = R"(
interarrival.kind = uniform
interarrival.lo = 0
interarrival.hi = 5
cluster.kind = threshold
cluster.threshold = 1
cluster.mean_above = 0.5
cluster.mean_below = 5
cluster.offset_sd = 1
)";

ExperimentConfig window_mean_config(std::size_t reps, std::uint64_t seed) {
  auto kv = KeyValueConfig::parse_string(std::string(kThreshold) +
                                         "experiment.kind = window_mean\n"
                                         "experiment.t = 500\n"
                                         "experiment.x = 1\n"
                                         "experiment.reps = " + std::to_string(reps) + "\n" +
                                         "experiment.seed = " + std::to_string(seed) + "\n");
  return parse_experiment_config(kv);
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("rcs-test-" + std::to_string(::getpid()) + "-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RCS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("key-value parsing") {
  const auto kv = KeyValueConfig::parse_string(
      "# comment\n\n a = 1 \nb=two words\nc = 1e5\nd = true\ne = 1, 2.5, 3\nf = linspace(0, 1, 5)\n");
  CHECK(kv.get_double("a") == 1.0);
  CHECK(kv.get_string("b") == "two words");
  CHECK(kv.get_uint("c") == 100000);
  CHECK(kv.get_bool("d"));
  CHECK(kv.get_list("e") == std::vector<double>{1, 2.5, 3});
  CHECK(kv.get_list("f") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(kv.get_double("missing", 4.0) == 4.0);
  CHECK_THROWS_AS(kv.get_double("b"), ConfigError);
  CHECK_THROWS_AS(kv.get_string("missing"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_string("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::parse_string("no equals sign\n"), ConfigError);
}

TEST_CASE("process spec config") {
  SUBCASE("missing interarrival kind") {
    CHECK_THROWS_AS(parse_process_spec(KeyValueConfig::parse_string("cluster.kind = empty\n")),
                    ConfigError);
  }

  SUBCASE("unknown keys are rejected") {
    auto kv = KeyValueConfig::parse_string(std::string(kThreshold) + "cluster.typo = 3\n");
    CHECK_THROWS_AS(parse_experiment_config(kv), ConfigError);
  }

  SUBCASE("round trip through the config form") {
    for (const auto& spec :
         {threshold_uniform_preset(),
          bartlett_lewis_preset(2.0, SizeLaw::poisson(3.0), InterarrivalLaw::gamma(2.0, 0.5)),
          poisson_preset(0.25)}) {
      const auto back = parse_process_spec(process_spec_to_config(spec));
      CHECK(back.describe() == spec.describe());
    }
    ProcessSpec mixed;
    mixed.delay = InterarrivalLaw::uniform(1, 2);
    mixed.interarrival = InterarrivalLaw::mixture(
        {0.25, 0.75}, {InterarrivalLaw::exponential(2.0), InterarrivalLaw::uniform(0, 1)});
    mixed.cluster = cluster::Iid{SizeLaw::constant(2), OffsetLaw::uniform(-1, 1)};
    CHECK(parse_process_spec(process_spec_to_config(mixed)).describe() == mixed.describe());
  }

  SUBCASE("presets match their config files") {
    auto kv = KeyValueConfig::parse_string(kThreshold);
    CHECK(parse_process_spec(kv).describe() == threshold_uniform_preset().describe());
  }
}

TEST_CASE("experiment config") {
  const auto cfg = window_mean_config(1234, 9);
  CHECK(cfg.kind == ExperimentKind::WindowMean);
  CHECK(cfg.n_rep == 1234);
  CHECK(cfg.seed == 9);
  CHECK(cfg.params.t == 500.0);
  for (auto k : {ExperimentKind::WindowMean, ExperimentKind::Elementary, ExperimentKind::RecurrenceCdf,
                 ExperimentKind::VoidProb, ExperimentKind::RenewalFunction, ExperimentKind::KeyRenewal,
                 ExperimentKind::Coupling, ExperimentKind::StationarityCheck, ExperimentKind::FlipTest})
    CHECK(parse_experiment_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_experiment_kind("nonsense"), ConfigError);
}

TEST_CASE("window-mean experiment report") {
  const auto out = run_experiment(window_mean_config(4000, 3));
  CHECK(out.passed);
  REQUIRE(out.reports.size() == 1);
  const auto& r = out.reports[0];
  CHECK(*r.target == doctest::Approx(0.56));
  CHECK(r.ci_low <= 0.56);
  CHECK(0.56 <= r.ci_high);
  CHECK(r.stream_id == experiment_stream_id(ExperimentKind::WindowMean));
  for (const char* name : {"report.csv", "report.jsonl", "manifest.json"}) CHECK(out.artifacts.count(name));

  std::istringstream csv(out.artifacts.at("report.csv"));
  const auto back = read_report_csv(csv);
  REQUIRE(back.size() == 1);
  CHECK(back[0].estimate == r.estimate);
  CHECK(*back[0].target == *r.target);

  const auto jl = nlohmann::json::parse(out.artifacts.at("report.jsonl"));
  CHECK(jl["estimate"].get<double>() == r.estimate);
  const auto manifest = nlohmann::json::parse(out.artifacts.at("manifest.json"));
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["experiment"] == "window_mean");
}

TEST_CASE("results do not depend on the thread count") {
  const auto cfg = window_mean_config(3000, 5);
  const auto a = run_experiment(cfg, 1);
  const auto b = run_experiment(cfg, 4);
  const auto c = run_experiment(cfg, 1);
  CHECK(a.artifacts == b.artifacts);
  CHECK(a.artifacts == c.artifacts);
  CHECK(run_experiment(window_mean_config(3000, 6), 1).artifacts.at("report.csv") !=
        a.artifacts.at("report.csv"));
}

TEST_CASE("parallel_map") {
  const auto v = parallel_map<int>(100, 8, [](std::size_t i) { return int(i * i); });
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == int(i * i));
  CHECK_THROWS_WITH(parallel_map<int>(50, 4,
                                      [](std::size_t i) -> int {
                                        if (i == 7 || i == 30) throw Error("bad " + std::to_string(i));
                                        return 0;
                                      }),
                    "bad 7");
  CHECK(resolve_threads(3) == 3);
}

TEST_CASE("command-line exit statuses") {
  const auto dir = scratch("cli");
  const auto good = dir / "good.cfg";
  write_file(good, std::string(kThreshold) +
                       "experiment.kind = window_mean\nexperiment.t = 100\nexperiment.reps = 2000\n");

  SUBCASE("malformed config exits 2 without output") {
    const auto bad = dir / "bad.cfg";
    write_file(bad, "cluster.kind = empty\nexperiment.kind = window_mean\n");
    const auto out = dir / "bad-out";
    CHECK(run_cli("verify --config " + bad.string() + " --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
    CHECK(run_cli("verify --config " + (dir / "missing.cfg").string() + " --out " + out.string()) == 2);
    CHECK_FALSE(fs::exists(out));
    CHECK(run_cli("verify --bogus-flag") == 2);
  }

  SUBCASE("passing experiment exits 0 and report agrees") {
    const auto out = dir / "good-out";
    CHECK(run_cli("verify --config " + good.string() + " --out " + out.string() + " --threads 2") == 0);
    CHECK(fs::exists(out / "report.csv"));
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(run_cli("report --in " + out.string()) == 0);

    const auto again = dir / "good-out-2";
    CHECK(run_cli("verify --config " + good.string() + " --out " + again.string() + " --threads 1") == 0);
    CHECK(read_file(out / "report.csv") == read_file(again / "report.csv"));
  }

  SUBCASE("report flags a target outside the CI") {
    const auto csv = dir / "off.csv";
    write_file(csv, std::string(kReportCsvHeader) + "\n1,0.01,0.97,1.03,100,2,1,0\n");
    CHECK(run_cli("report --in " + csv.string()) == 1);
  }

  SUBCASE("runtime failure exits 3") {
    const auto cfg = dir / "runaway.cfg";
    write_file(cfg, std::string(kThreshold) +
                        "experiment.kind = window_mean\nexperiment.t = 1000\nexperiment.reps = 10\n"
                        "sampling.runaway_cap = 5\n");
    CHECK(run_cli("verify --config " + cfg.string() + " --out " + (dir / "rt").string()) == 3);
  }

  SUBCASE("simulate writes readable patterns") {
    const auto out = dir / "sim";
    CHECK(run_cli("simulate --config " + good.string() + " --lo 10 --hi 60 --marked --seed 4 --out " +
                  out.string()) == 0);
    std::ifstream in(out / "pattern.csv");
    const auto p = read_point_pattern_csv(in, Window{10, 60});
    CHECK(p.size() > 0);
    std::ifstream min(out / "marked.csv");
    CHECK_NOTHROW(read_marked_pattern_csv(min, Window{-1e9, 1e9}));

    const auto st = dir / "sim-st";
    CHECK(run_cli("simulate --config " + good.string() + " --lo -5 --hi 5 --stationary --out " +
                  st.string()) == 0);
    CHECK(fs::exists(st / "pattern.csv"));
  }

  fs::remove_all(dir);
}

TEST_CASE("shipped configs parse") {
  std::size_t experiments = 0;
  for (const auto& entry : fs::recursive_directory_iterator(RCS_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    CAPTURE(entry.path().string());
    std::ifstream in(entry.path());
    auto kv = KeyValueConfig::parse(in);
    if (kv.has("experiment.kind")) {
      CHECK_NOTHROW(parse_experiment_config(kv));
      ++experiments;
    } else {
      CHECK_NOTHROW(parse_process_spec(kv));
      CHECK(kv.unread().empty());
    }
  }
  CHECK(experiments >= 9);
}
