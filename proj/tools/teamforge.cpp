// Copyright 2026 The TeamForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// teamforge: simulations, baselines, solver audits and the session service.

#include <pthread.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "teamforge/http_server.hpp"
#include "teamforge/matching.hpp"
#include "teamforge/serialize.hpp"
#include "teamforge/service.hpp"
#include "teamforge/simulate.hpp"

namespace fs = std::filesystem;
using namespace teamforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct SeedRange {
  std::uint64_t first = 1;
  std::uint64_t last = 1;
};

SeedRange parse_seeds(const std::string& text) {
  auto parse = [&](std::string_view part) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    require(ec == std::errc() && ptr == part.data() + part.size() && !part.empty(),
            "seeds must look like \"a..b\" or \"a\", got '" + text + "'");
    return v;
  };
  const auto dots = text.find("..");
  SeedRange range;
  if (dots == std::string::npos) {
    range.first = range.last = parse(text);
  } else {
    range.first = parse(std::string_view(text).substr(0, dots));
    range.last = parse(std::string_view(text).substr(dots + 2));
  }
  require(range.first <= range.last, "seed range '" + text + "' is empty");
  return range;
}

std::string number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string number(const std::optional<double>& v) {
  return v ? number(*v) : std::string();
}

void write_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kConflict, "cannot write " + tmp.string());
    out << content;
    if (!out) fail(ErrorKind::kConflict, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Flags shared by `simulate` and `baseline`.
struct RunFlags {
  std::optional<std::size_t> participants;
  std::string pool_file;
  std::string config_file;
  std::optional<std::size_t> team_size;
  std::optional<std::size_t> rounds;
  std::string seeds = "1..1";
  std::optional<double> noise;
  std::optional<double> w_sim;
  std::optional<double> w_comp;
  std::optional<double> exploration;
  std::optional<std::size_t> batch;
  std::optional<double> prior;
  std::string generator;
  std::optional<std::size_t> sample_max;
  std::optional<std::size_t> sample_min;
  std::string utility;
  std::optional<double> gap;
  std::string reward;
  std::string out_dir = "out";
  std::size_t jobs = 0;
  std::string mode = "bandit";

  void add_to(CLI::App& cmd) {
    auto* n = cmd.add_option("--participants", participants,
                             "Number of synthetic participants");
    auto* pool = cmd.add_option("--pool", pool_file,
                                "Participant pool JSON file")->check(CLI::ExistingFile);
    n->excludes(pool);
    cmd.add_option("--config", config_file, "Episode configuration JSON file")
        ->check(CLI::ExistingFile);
    cmd.add_option("--team-size", team_size, "Team size k");
    cmd.add_option("--rounds", rounds, "Feedback rounds per participant");
    cmd.add_option("--seeds", seeds, "Seed or inclusive range a..b");
    cmd.add_option("--noise", noise, "Reward noise sigma");
    cmd.add_option("--wsim", w_sim, "Weight of trait similarity");
    cmd.add_option("--wcomp", w_comp, "Weight of trait complementarity");
    cmd.add_option("--exploration", exploration, "UCB exploration constant c");
    cmd.add_option("--batch", batch, "Recommendations per round B");
    cmd.add_option("--prior", prior, "Score of never-rated matrix cells");
    cmd.add_option("--generator", generator, "auto | enumerate | sample")
        ->check(CLI::IsMember({"auto", "enumerate", "sample"}));
    cmd.add_option("--m-max", sample_max, "Sampled candidates, upper bound");
    cmd.add_option("--m-min", sample_min, "Sampled candidates per participant");
    cmd.add_option("--utility", utility, "traits | planted")
        ->check(CLI::IsMember({"traits", "planted"}));
    cmd.add_option("--gap", gap, "Best-arm gap for planted utilities");
    cmd.add_option("--reward", reward, "gaussian | bernoulli")
        ->check(CLI::IsMember({"gaussian", "bernoulli"}));
    cmd.add_option("--out", out_dir, "Output directory");
    cmd.add_option("--jobs", jobs, "Parallel seeds (0: hardware threads)");
  }

  EpisodeConfig to_config() const {
    EpisodeConfig c;
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      Json j;
      try {
        in >> j;
      } catch (const Json::exception& e) {
        fail(ErrorKind::kInvalidArgument,
             "config " + config_file + " is not valid JSON: " + e.what());
      }
      c = episode_config_from_json(j, c);
    }
    if (!pool_file.empty()) c.pool = load_pool(pool_file);
    if (participants) {
      c.participants = *participants;
      c.pool.clear();
    }
    if (team_size) c.team_size = *team_size;
    if (rounds) c.rounds = *rounds;
    if (noise) c.model.noise_sigma = *noise;
    if (w_sim) {
      c.model.w_sim = *w_sim;
      if (!w_comp) c.model.w_comp = 1.0 - *w_sim;
    }
    if (w_comp) {
      c.model.w_comp = *w_comp;
      if (!w_sim) c.model.w_sim = 1.0 - *w_comp;
    }
    if (exploration) c.bandit.exploration = *exploration;
    if (batch) c.bandit.batch = *batch;
    if (prior) c.prior = *prior;
    if (!generator.empty()) {
      c.generator = generator == "enumerate" ? GeneratorKind::kEnumerate
                    : generator == "sample"  ? GeneratorKind::kSample
                                             : GeneratorKind::kAuto;
    }
    if (sample_max) c.sample_max = *sample_max;
    if (sample_min) c.sample_min = *sample_min;
    if (!utility.empty()) {
      c.utility = utility == "planted" ? UtilityKind::kPlanted : UtilityKind::kTraits;
    }
    if (gap) c.planted_gap = *gap;
    if (!reward.empty()) {
      c.model.reward =
          reward == "bernoulli" ? RewardKind::kBernoulli : RewardKind::kGaussian;
    }
    require(!c.pool.empty() || c.participants >= 1,
            "give --participants N or --pool FILE");
    require(c.team_size >= 1, "--team-size must be at least 1");
    c.validate();
    return c;
  }
};

const char* kSummaryHeader =
    "seed,mode,participants,team_size,candidates,rounds,assignment_utility,"
    "oracle_utility,alignment_ratio,best_arm_hit_rate,regret_early,regret_late,"
    "random_utility,self_assembled_utility,prior_fraction\n";

std::string summary_row(const EpisodeReport& r) {
  const RegretWindows w = regret_windows(r);
  std::string row = std::to_string(r.seed) + "," + r.mode + "," +
                    std::to_string(r.users.size()) + "," +
                    std::to_string(r.config.team_size) + "," +
                    std::to_string(r.candidate_count) + "," +
                    std::to_string(r.config.rounds) + "," +
                    number(r.assignment_utility) + "," + number(r.oracle_utility) +
                    "," + number(r.alignment_ratio) + ",";
  if (!r.best_arm_hit.empty()) {
    row += number(best_arm_hit_rate(r)) + "," + number(w.early) + "," +
           number(w.late);
  } else {
    row += ",,";
  }
  row += "," + number(r.random_utility) + "," + number(r.self_assembled_utility) +
         "," + number(r.prior_fraction) + "\n";
  return row;
}

int run_reports(const RunFlags& flags) {
  BaselineMode mode;
  EpisodeConfig config;
  SeedRange seeds;
  try {
    mode = parse_baseline_mode(flags.mode);
    config = flags.to_config();
    seeds = parse_seeds(flags.seeds);
    const std::size_t n = config.pool.empty() ? config.participants : config.pool.size();
    if (mode == BaselineMode::kSelfAssembled) {
      require(n % config.team_size == 0,
              "--mode self needs --team-size to divide the number of participants");
    }
  } catch (const Error& e) {
    std::cerr << "teamforge: " << e.what() << "\n";
    return kExitUsage;
  }

  const fs::path out(flags.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "teamforge: cannot create " << out << ": " << ec.message() << "\n";
    return kExitRuntime;
  }

  const std::size_t count = seeds.last - seeds.first + 1;
  std::vector<std::string> rows(count);
  std::vector<std::string> errors;
  std::mutex errors_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      const std::uint64_t seed = seeds.first + i;
      try {
        const EpisodeReport report = run_baseline(mode, config, seed);
        write_atomically(out / ("report_seed_" + std::to_string(seed) + ".json"),
                         to_json(report).dump(2) + "\n");
        rows[i] = summary_row(report);
      } catch (const std::exception& e) {
        std::lock_guard lock(errors_mutex);
        errors.push_back("seed " + std::to_string(seed) + ": " + e.what());
      }
    }
  };
  std::size_t jobs = flags.jobs != 0 ? flags.jobs
                                     : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, count);
  std::vector<std::thread> threads;
  for (std::size_t t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  if (!errors.empty()) {
    std::sort(errors.begin(), errors.end());
    for (const auto& e : errors) std::cerr << "teamforge: " << e << "\n";
    return kExitRuntime;
  }
  std::string csv = kSummaryHeader;
  for (const auto& row : rows) csv += row;
  write_atomically(out / "summary.csv", csv);
  std::cout << "wrote " << count << " report(s) and summary.csv to " << out.string()
            << "\n";
  return kExitOk;
}

int run_audit(std::size_t instances, std::size_t max_n, std::uint64_t seed) {
  if (max_n < 1 || max_n > 10) {
    std::cerr << "teamforge: --max-n must be in 1..10\n";
    return kExitUsage;
  }
  if (instances == 0) {
    std::cerr << "teamforge: warning: --instances 0, nothing to audit\n";
    std::cout << "audit: 0 instances, 0 mismatches\n";
    return kExitOk;
  }
  Rng rng = make_rng(seed, "audit");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> sizes;
  for (std::size_t k : {2, 4}) {
    if (k <= max_n) sizes.push_back(k);
  }
  if (sizes.empty()) sizes.push_back(1);

  std::size_t mismatches = 0;
  std::size_t infeasible = 0;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t k = sizes[std::uniform_int_distribution<std::size_t>(
        0, sizes.size() - 1)(rng)];
    const std::size_t n =
        k * std::uniform_int_distribution<std::size_t>(1, max_n / k)(rng);
    const std::vector<Participant> pool = random_pool(n, rng);
    CandidateSet cs = enumerate_candidates(pool, k);
    // A quarter of the instances lose some candidates, which may make them
    // infeasible; both solvers must agree on that too.
    if (unit(rng) < 0.25 && cs.candidates.size() > 1) {
      std::vector<TeamComposition> kept;
      for (auto& team : cs.candidates) {
        if (unit(rng) >= 0.3) kept.push_back(std::move(team));
      }
      cs.candidates = std::move(kept);
    }

    PreferenceMatrix matrix;
    matrix.users = cs.pool_ids;
    for (const auto& team : cs.candidates) matrix.teams.push_back(team.team_id());
    const std::size_t cols = matrix.teams.size();
    matrix.scores.assign(n * cols, 0.0);
    matrix.sources.assign(n * cols, CellSource::kInvalid);
    for (std::size_t t = 0; t < cols; ++t) {
      for (const auto& m : cs.candidates[t].members()) {
        const std::size_t u = matrix.user_index(m);
        const bool prior = unit(rng) < 0.2;
        matrix.scores[u * cols + t] = prior ? kDefaultPrior : unit(rng);
        matrix.sources[u * cols + t] = prior ? CellSource::kPrior : CellSource::kObserved;
      }
    }

    std::optional<double> exact;
    try {
      exact = solve_partition_exact(matrix, cs).total_value;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kInfeasible) throw;
    }
    const auto oracle = enumerate_best_partition(cs, team_values(matrix, cs));
    const bool agree = exact.has_value() == oracle.has_value() &&
                       (!exact || std::abs(*exact - oracle->value) <= 1e-9);
    if (!oracle) ++infeasible;
    if (!agree) {
      ++mismatches;
      std::cerr << "mismatch on instance " << i << " (n=" << n << ", k=" << k
                << "): exact=" << (exact ? number(*exact) : "infeasible")
                << " enumeration="
                << (oracle ? number(oracle->value) : "infeasible") << "\n";
    }
  }
  std::cout << "audit: " << instances << " instances (" << infeasible
            << " infeasible), " << mismatches << " mismatches\n";
  return mismatches == 0 ? kExitOk : kExitRuntime;
}

struct ServeFlags {
  std::optional<int> port;
  std::optional<std::string> host;
  std::optional<std::string> log;
  std::string config_file;
};

int run_serve(ServeFlags flags) {
  try {
    // Port precedence: flag, environment, config file, 8080.
    if (!flags.port) {
      if (const char* env = std::getenv("TEAMFORGE_PORT")) {
        flags.port = std::stoi(env);
      }
    }
    if (!flags.config_file.empty()) {
      std::ifstream in(flags.config_file);
      const Json j = Json::parse(in);
      if (!flags.port && j.contains("port")) flags.port = j["port"].get<int>();
      if (!flags.host && j.contains("host")) flags.host = j["host"].get<std::string>();
      if (!flags.log && j.contains("log")) flags.log = j["log"].get<std::string>();
    }
  } catch (const std::exception& e) {
    std::cerr << "teamforge: bad serve configuration: " << e.what() << "\n";
    return kExitUsage;
  }
  const int port = flags.port.value_or(8080);
  const std::string host = flags.host.value_or("127.0.0.1");
  const std::string log = flags.log.value_or("sessions.jsonl");
  if (port < 0 || port > 65535) {
    std::cerr << "teamforge: port out of range\n";
    return kExitUsage;
  }

  // Block termination signals in every thread; a dedicated thread waits for
  // them and stops the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGINT);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    ServiceOptions options;
    options.log_path = log;
    SessionService service(options);
    HttpServer server(service);
    const int bound = server.bind(host, port);
    std::cout << "teamforge: listening on " << host << ":" << bound << " (log " << log
              << ")" << std::endl;

    std::thread waiter([&] {
      int received = 0;
      sigwait(&signals, &received);
      server.stop();
    });
    server.serve();
    service.flush();
    // serve() only returns after stop(); the waiter has already finished.
    waiter.join();
    std::cout << "teamforge: shut down" << std::endl;
  } catch (const Error& e) {
    std::cerr << "teamforge: " << e.what() << "\n";
    return e.kind() == ErrorKind::kInvalidArgument ? kExitUsage : kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"teamforge: bandit-driven team formation"};
  app.require_subcommand(1);

  RunFlags simulate_flags;
  auto* simulate = app.add_subcommand("simulate", "Run the offline simulation");
  simulate_flags.add_to(*simulate);

  RunFlags baseline_flags;
  auto* baseline = app.add_subcommand("baseline", "Run a baseline condition");
  baseline_flags.add_to(*baseline);
  baseline->add_option("--mode", baseline_flags.mode, "random | self | bandit")
      ->required()
      ->check(CLI::IsMember({"random", "self", "self_assembled", "bandit"}));

  std::size_t instances = 200;
  std::size_t max_n = 8;
  std::uint64_t audit_seed = 1;
  auto* audit = app.add_subcommand("audit", "Check the exact solver against enumeration");
  audit->add_option("--instances", instances, "Random instances to check");
  audit->add_option("--max-n", max_n, "Largest pool size (at most 10)");
  audit->add_option("--seed", audit_seed, "Instance generator seed");

  ServeFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--port", serve_flags.port,
                    "Listen port, 0 for ephemeral (default $TEAMFORGE_PORT or 8080)");
  serve->add_option("--host", serve_flags.host, "Listen address (default 127.0.0.1)");
  serve->add_option("--log", serve_flags.log, "Event log, JSON lines (default sessions.jsonl)");
  serve->add_option("--config", serve_flags.config_file,
                    "JSON file with port, host and log")
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return run_reports(simulate_flags);
    if (*baseline) return run_reports(baseline_flags);
    if (*audit) return run_audit(instances, max_n, audit_seed);
    if (*serve) return run_serve(serve_flags);
  } catch (const Error& e) {
    std::cerr << "teamforge: " << e.what() << "\n";
    return e.kind() == ErrorKind::kInvalidArgument ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "teamforge: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
